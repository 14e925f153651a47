#pragma once

#include "baselines.hpp"
#include "model.hpp"
#include "report.hpp"

namespace fdtwrc {

/// Alternating optimization for the joint beamforming problem: cycles the
/// relay transmit, relay receive, user transmit and user receive updates
/// from a feasible starting point and audits stage-wise monotonicity.
SolveReport run_ao(const ChannelSet& ch, const LinkBudget& budget, const AoConfig& cfg,
                   const BeamformerSet& init);

/// Runs one named scheme on one channel draw. Every scheme starts from the
/// closed-form initialization on its own channel set (true channels, or the
/// zero-SI copy for the ideal/half-duplex schemes).
SolveReport run_scheme(SchemeKind kind, const ChannelSet& ch, const LinkBudget& budget,
                       const AoConfig& cfg);

}  // namespace fdtwrc
