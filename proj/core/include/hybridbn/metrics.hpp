#pragma once

#include <span>

namespace hbn {

/// KL(p || q) in nats with q floored at 1e-12; zero-p terms contribute 0.
/// Throws std::invalid_argument on length mismatch.
double kl_divergence(std::span<const double> p, std::span<const double> q);

/// Total variation distance, 0.5 * sum |p - q|.
double total_variation(std::span<const double> p, std::span<const double> q);

}  // namespace hbn
