#pragma once

// Lane-batched Dormand-Prince 5(4) trial step for the rotating-frame system.
//
// Every variant evaluates the same expression tree in the same order with no
// fused multiply-add, so a lane produces bit-identical results regardless of
// which instruction set (or which neighbouring lanes) computed it.

#include <cstddef>
#include <string_view>

namespace hardexc::kernels {

enum class Isa { scalar, avx2, avx512 };

std::string_view isa_name(Isa isa);
/// Parses "scalar", "avx2", "avx512"; throws std::invalid_argument otherwise.
Isa parse_isa(std::string_view name);
std::size_t lane_width(Isa isa);
bool isa_supported(Isa isa);
/// Widest supported ISA, unless HARDEXC_ISA names a supported one.
Isa default_isa();

/// Number of per-lane coefficients: gamma1, gamma2, gammaB, dOmega1, Delta2,
/// dOmegaB, g, Omega1, Omega2 (in this order).
inline constexpr std::size_t kCoeffs = 9;
inline constexpr std::size_t kDim = 6;

/// Structure-of-arrays view over `lanes` independent systems.  Vector
/// quantities are stored component-major: element (c, lane) lives at
/// `c * stride + lane`.
struct LaneBlock {
  std::size_t lanes = 0;
  std::size_t stride = 0;
  const double* coeff = nullptr;  // kCoeffs x stride
  const double* y = nullptr;      // kDim x stride
  const double* k1 = nullptr;     // derivative at y
  const double* h = nullptr;      // per-lane step
  double* ynew = nullptr;         // kDim x stride
  double* k7 = nullptr;           // derivative at ynew (FSAL)
  double* err = nullptr;          // scaled error norm; <= 1 means accept
  double absTol = 0.0;
  double relTol = 0.0;
};

void dp5_trial(Isa isa, const LaneBlock& block);

namespace detail {
void dp5_trial_scalar(const LaneBlock& block, std::size_t begin,
                      std::size_t end);
void dp5_trial_avx2(const LaneBlock& block, std::size_t begin,
                    std::size_t end);
void dp5_trial_avx512(const LaneBlock& block, std::size_t begin,
                      std::size_t end);
}  // namespace detail

}  // namespace hardexc::kernels
