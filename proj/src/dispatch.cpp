#include <cstdlib>
#include <stdexcept>
#include <string>

#include "hardexc/kernels.hpp"

namespace hardexc::kernels {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::avx512:
      return "avx512";
  }
  return "unknown";
}

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  if (name == "avx512") return Isa::avx512;
  throw std::invalid_argument("unknown ISA '" + std::string(name) + "'");
}

std::size_t lane_width(Isa isa) {
  switch (isa) {
    case Isa::avx2:
      return 4;
    case Isa::avx512:
      return 8;
    default:
      return 1;
  }
}

bool isa_supported(Isa isa) {
#if defined(HARDEXC_HAVE_X86_KERNELS)
  __builtin_cpu_init();
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
      return __builtin_cpu_supports("avx2");
    case Isa::avx512:
      return __builtin_cpu_supports("avx512f");
  }
  return false;
#else
  return isa == Isa::scalar;
#endif
}

Isa default_isa() {
  if (const char* env = std::getenv("HARDEXC_ISA")) {
    const Isa wanted = parse_isa(env);
    if (isa_supported(wanted)) return wanted;
  }
  if (isa_supported(Isa::avx512)) return Isa::avx512;
  if (isa_supported(Isa::avx2)) return Isa::avx2;
  return Isa::scalar;
}

void dp5_trial(Isa isa, const LaneBlock& block) {
  if (!isa_supported(isa))
    throw std::invalid_argument("ISA not supported on this host: " +
                                std::string(isa_name(isa)));
#if defined(HARDEXC_HAVE_X86_KERNELS)
  switch (isa) {
    case Isa::avx2:
      detail::dp5_trial_avx2(block, 0, block.lanes);
      return;
    case Isa::avx512:
      detail::dp5_trial_avx512(block, 0, block.lanes);
      return;
    default:
      break;
  }
#endif
  detail::dp5_trial_scalar(block, 0, block.lanes);
}

}  // namespace hardexc::kernels
