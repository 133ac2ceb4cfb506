#ifndef BLASCHKE_LAB_DIGEST_HPP
#define BLASCHKE_LAB_DIGEST_HPP

#include <cstdint>
#include <cstdio>
#include <string>
#include <string_view>

#include "logconcave.hpp"
#include "measures.hpp"

namespace blaschke_lab {

/// 64-bit FNV-1a, fed with text; doubles go in as hex-float so digests are exact.
class Digest {
 public:
  Digest& add(std::string_view s) {
    for (unsigned char c : s) {
      h_ ^= c;
      h_ *= 0x100000001b3ULL;
    }
    h_ ^= 0xff;
    h_ *= 0x100000001b3ULL;
    return *this;
  }
  /// Hex float of the value; −0 and +0 hash alike, as in the JSON files.
  Digest& add(double v) {
    if (v == 0.0) v = 0.0;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%a", v);
    return add(std::string_view(buf));
  }
  Digest& add(Vec2 v) { return add(v.x).add(v.y); }
  Digest& add(const SurfaceAreaPair& p) {
    add("pair").add(static_cast<double>(p.dim));
    for (const auto& m : p.mu) add(m.z).add(m.a);
    add("nu");
    for (const auto& n : p.nu) add(n.theta).add(n.b);
    return *this;
  }
  Digest& add(const RadialPair& p) {
    add("radial-pair").add(static_cast<double>(p.dim));
    for (const auto& a : p.grad) add(a.g).add(a.a);
    return add(p.boundary);
  }
  Digest& add(const PolyhedralLogConcave& f) {
    add("polyhedral");
    for (const auto& pc : f.pieces()) add(pc.z).add(pc.c);
    add("domain");
    for (const auto& h : f.domain()) add(h.normal).add(h.offset);
    return *this;
  }
  Digest& add(const RadialLogConcave& f) {
    add("radial").add(static_cast<double>(f.dim()));
    for (const auto& k : f.knots()) add(k.first).add(k.second);
    return add(f.tail_slope() ? *f.tail_slope() : -1.0);
  }
  Digest& add(const Polygon& K) {
    add("polygon");
    for (Vec2 v : K.vertices()) add(v);
    return *this;
  }

  std::uint64_t value() const { return h_; }
  std::string hex() const {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h_));
    return buf;
  }

 private:
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

} // namespace blaschke_lab

#endif
