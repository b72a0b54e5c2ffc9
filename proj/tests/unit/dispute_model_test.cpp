#include <gtest/gtest.h>

#include "dispute_harness.hpp"
#include "support.hpp"

using namespace ccchain;
using namespace ccchain::testing;

TEST(DisputeModel, AllInterleavingsKeepInvariants) {
  const auto report = model_check_disputes();
  EXPECT_EQ(report.runs, 720u * 3u * 2u);
  EXPECT_EQ(report.failures, 0u);
  for (const auto& f : report.first_failures) ADD_FAILURE() << f;
  EXPECT_TRUE(report.exporter_terminals.contains(TransferState::ImportConfirmed));
  EXPECT_TRUE(report.exporter_terminals.contains(TransferState::Retracted));
  EXPECT_TRUE(report.exporter_terminals.contains(TransferState::ConvertedToSell));
  EXPECT_TRUE(report.exporter_terminals.contains(TransferState::RebuttedByProof));
}

TEST(DisputeModel, ScriptedOutcomes) {
  struct Case {
    Importer behaviour;
    ComplaintIndicator indicator;
    TransferState expected;
  };
  const Case cases[] = {
      {Importer::Cooperative, ComplaintIndicator::Retract, TransferState::ImportConfirmed},
      {Importer::Silent, ComplaintIndicator::Retract, TransferState::Retracted},
      {Importer::Silent, ComplaintIndicator::ConvertToSell, TransferState::ConvertedToSell},
      {Importer::ImportsButSilent, ComplaintIndicator::Retract, TransferState::RebuttedByProof},
  };
  for (const auto& c : cases) {
    DisputeRun run(c.behaviour, c.indicator);
    const auto out = run.finish();
    EXPECT_EQ(out.exporter_state, c.expected) << importer_name(c.behaviour);
    EXPECT_TRUE(out.violations.empty()) << out.violations.front();
  }
}

TEST(DisputeModel, ScriptedAnnouncementFallback) {
  EXPECT_EQ(scripted_announcement_fallback(), TransferState::BuyFallback);
}
