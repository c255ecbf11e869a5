#pragma once

#include "vnfsim/model.hpp"
#include "vnfsim/rng.hpp"

namespace vnfsim {

/// Weighted best-fit score of hosting on `ec`:
///   a * free_cpu / 100 + (1 - a) * (1 / hops)
/// where a = used bandwidth of the EC's link / total bandwidth of all links.
/// Near saturation the free-CPU term dominates, on an idle network proximity
/// does.
double bestfit_score(const AllocationMatrix& m, const Scenario& sc, int ec);

/// Rejects when no EC fits. With exactly one candidate, places there. When
/// every candidate has the same free CPU and free bandwidth, picks uniformly
/// at random; otherwise takes the highest score, lowest EC index on ties.
Action bestfit_place(const AllocationMatrix& m, const Scenario& sc, int type, Rng& rng);

}  // namespace vnfsim
