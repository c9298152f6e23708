#pragma once

#include <string>

#include "otail/counting.hpp"
#include "otail/sequence.hpp"

namespace otail {

// Bundled study configurations exercising each of the three checkers.
//   1: Pareto(k, alpha) prefix of length D, then exponential rates lambda/k,
//      unbounded counting (uniform-ratio checker applies).
//   2: one exponential plus standard uniforms, counting uniform on 1..D
//      (bounded-count checker applies).
//   3: finite-table prefix, sqrt-exponential tail at kappa, plateau tails on
//      the perfect-square offsets, Poisson counting (asymptotic checker
//      applies; the uniform-ratio checker provably does not).
struct Preset {
    std::string name;
    SequenceSpec sequence;
    CountingDist counting;
    long kappa;
    int theorem;       // checker expected to apply
    long bounded_D;    // support bound for the bounded-count checker, 0 if none
};

struct PresetParams {
    double alpha = 2.0;
    double lambda = 1.0;
    long D = 0;  // 0: per-preset default (3 for preset 1, 5 for preset 2)
};

Preset make_preset(int id, const PresetParams& params = {});

}
