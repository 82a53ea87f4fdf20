#pragma once

#include "io_internal.hpp"
#include "pol/dpdl.hpp"

namespace pol::detail {

void audit_sat_verdict();
void audit_witness_failure();

Json dpdl_model_json(const DpdlModel& m);

}  // namespace pol::detail
