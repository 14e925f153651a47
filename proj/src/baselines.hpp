#pragma once

#include "model.hpp"
#include "report.hpp"

namespace fdtwrc {

/// Feasible starting point: all-ones receive filters, self-interference
/// nulled user transmitters with a 3 dB margin over the feasibility
/// threshold, and the relay transmitter scaled to meet both targets along a
/// combined null-space direction.
BeamformerSet init_beamformers(const ChannelSet& ch, const LinkBudget& budget);

/// Closed-form zero-forcing updates. Each step keeps the self-interference
/// nulling identities exact and uses minimal scaling along a principal
/// direction, so the binding SINR constraint comes out tight.
void zf_f_step(const ChannelSet& ch, BeamformerSet& bf, const LinkBudget& budget);
void zf_u_step(const ChannelSet& ch, BeamformerSet& bf);
void zf_v_step(const ChannelSet& ch, BeamformerSet& bf, const LinkBudget& budget);
void zf_w_step(const ChannelSet& ch, BeamformerSet& bf, const LinkBudget& budget);

/// Alternating closed-form ZF optimization; stops when a full cycle no
/// longer improves the total power.
SolveReport zf_ao(const ChannelSet& ch, const LinkBudget& budget, const AoConfig& cfg);

/// Copy with the three self-interference channels zeroed.
ChannelSet make_ideal(const ChannelSet& ch);

/// Equivalent SINR target for half-duplex schemes: (1 + theta)^2 - 1.
double hd_target(double theta_linear);

}  // namespace fdtwrc
