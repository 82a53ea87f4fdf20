// Every SAT verdict a solver hands out must survive its checker. Solvers count
// witnesses that did not; any such count fails the whole test run.

#include <catch_amalgamated.hpp>
#include <cstdio>
#include <cstdlib>

#include "pol/dpdl.hpp"

namespace {

class WitnessAudit : public Catch::EventListenerBase {
 public:
  using Catch::EventListenerBase::EventListenerBase;

  void testCaseEnded(const Catch::TestCaseStats& stats) override {
    const auto now = pol::solver_audit().witness_failures;
    if (now != seen_) {
      std::fprintf(stderr, "witness audit: %llu witness(es) failed their checker in '%s'\n",
                   static_cast<unsigned long long>(now - seen_), stats.testInfo->name.c_str());
      seen_ = now;
      failed_ = true;
    }
  }

  void testRunEnded(const Catch::TestRunStats&) override {
    const auto a = pol::solver_audit();
    std::fprintf(stderr, "witness audit: %llu sat verdicts, %llu checker failures\n",
                 static_cast<unsigned long long>(a.sat_verdicts),
                 static_cast<unsigned long long>(a.witness_failures));
    if (failed_) std::_Exit(3);
  }

 private:
  std::uint64_t seen_ = 0;
  bool failed_ = false;
};

}  // namespace

CATCH_REGISTER_LISTENER(WitnessAudit)
