#pragma once

#include <string>

#include "xsched/platform.hpp"

// Variable naming shared between the LP writer and the external-solution
// reader. Kept out of the public headers on purpose.
namespace xsched::detail {

inline std::string lp_sanitize(const std::string& raw) {
  std::string out = raw;
  for (char& ch : out) {
    const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                    (ch >= '0' && ch <= '9');
    if (!ok) ch = '_';
  }
  return out;
}

inline std::string lp_s(const std::string& node) { return "s_" + lp_sanitize(node); }
inline std::string lp_f(const std::string& node) { return "f_" + lp_sanitize(node); }

inline std::string lp_p(const std::string& node, const XpuInstance& xpu) {
  return "p_" + lp_sanitize(node) + "_" + lp_sanitize(xpu.label());
}

inline std::string lp_d(const std::string& i, const std::string& j,
                        const std::string& k, const XpuInstance& xpu) {
  return "d_" + lp_sanitize(i) + "_" + lp_sanitize(j) + "_" + lp_sanitize(k) + "_" +
         lp_sanitize(xpu.label());
}

inline std::string lp_b1(const std::string& i, const std::string& k) {
  return "b1_" + lp_sanitize(i) + "_" + lp_sanitize(k);
}

inline std::string lp_b2(const std::string& j, const std::string& k) {
  return "b2_" + lp_sanitize(j) + "_" + lp_sanitize(k);
}

inline std::string lp_c(const std::string& i, const std::string& j) {
  return "c_" + lp_sanitize(i) + "_" + lp_sanitize(j);
}

}  // namespace xsched::detail
