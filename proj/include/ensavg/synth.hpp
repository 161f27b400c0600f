#pragma once

#include <cstdint>
#include <vector>

#include "ensavg/core.hpp"

namespace ensavg::synth {

inline constexpr double kDefaultSharpness = 0.9;

/// Smallest sharpness accepted for a k-class catalog: 1/k.
double min_sharpness(std::size_t classes) noexcept;

struct SyntheticSample {
  ProbabilityMatrix probabilities;
  LabelVector labels;
};

/// Predictions and labels whose argmax confusion matrix is exactly `cm`.
///
/// Cell (a, p) contributes cm(a, p) samples labelled a whose probability row
/// puts sharpness + (1 - sharpness) / k on p and (1 - sharpness) / k on every
/// other class. Sample i (in cell-major order) is named "s<seed>_<i>", zero
/// padded to six digits. The emitted order is a Fisher-Yates shuffle driven by
/// std::mt19937_64 seeded with `seed`, drawing j = next() % (i + 1) for
/// i = n-1 down to 1.
///
/// Throws `InvalidSharpness` outside [1/k, 1] and `EmptyMatrix` for a zero matrix.
SyntheticSample generate_from_confusion(const ConfusionMatrix& cm, std::uint64_t seed,
                                        double sharpness = kDefaultSharpness);

/// Reference metrics computed by scanning samples once per class, without a
/// confusion matrix. Kept separate from the metrics engine so each can check
/// the other. Throws `IdMismatch` on misaligned inputs and `EmptyMatrix` when
/// both vectors are empty.
MetricsReport brute_force_metrics(const LabelVector& predicted, const LabelVector& truth,
                                  const ClassCatalog& catalog, F1Mode mode);

}  // namespace ensavg::synth
