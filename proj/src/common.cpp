#include "vfa/common.hpp"

#include <cmath>
#include <cstring>

namespace vfa {

std::string to_string(Modality m) {
  return m == Modality::Voice ? "voice" : "face";
}

Modality parse_modality(std::string_view s) {
  if (s == "voice") return Modality::Voice;
  if (s == "face") return Modality::Face;
  throw DataError("unknown modality '" + std::string(s) + "'");
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s, const std::string& context) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last) {
    throw DataError(context + ": bad number '" + std::string(s) + "'");
  }
  if (!std::isfinite(v)) {
    throw DataError(context + ": non-finite value '" + std::string(s) + "'");
  }
  return v;
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {
uint64_t fnv1a(std::string_view s) {
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}
}  // namespace

uint64_t derive_seed(uint64_t seed, std::string_view label) {
  return splitmix64(seed ^ fnv1a(label));
}

uint64_t derive_seed(uint64_t seed, std::string_view label, uint64_t index) {
  return splitmix64(derive_seed(seed, label) + index);
}

}  // namespace vfa
