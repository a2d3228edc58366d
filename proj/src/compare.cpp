#include "ctd/compare.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ctd {

CompareReport compare_fields(const FullField& a, const FullField& b, double interface_band) {
  if (!a.grid().same_shape(b.grid())) throw std::logic_error("compare_fields: grids differ");
  CompareReport r{0.0, 0.0, interface_band, 0, 0.0, 0.0, 0.0, FullField(b.grid())};
  r.relative_l2 = relative_l2(a.values(), b.values());
  double band_sum = 0.0, bulk_sum = 0.0, band_sq = 0.0, total_sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    r.difference[i] = d;
    r.max_abs = std::max(r.max_abs, d);
    total_sq += d * d;
    if (std::abs(b[i]) < interface_band) {
      ++r.interface_nodes;
      band_sum += d;
      band_sq += d * d;
    } else {
      bulk_sum += d;
    }
  }
  const std::size_t bulk_nodes = a.size() - r.interface_nodes;
  r.interface_mean_abs = r.interface_nodes ? band_sum / static_cast<double>(r.interface_nodes) : 0.0;
  r.bulk_mean_abs = bulk_nodes ? bulk_sum / static_cast<double>(bulk_nodes) : 0.0;
  r.interface_share = total_sq > 0.0 ? band_sq / total_sq : 0.0;
  return r;
}

std::string summary_line(const CompareReport& r) {
  std::ostringstream out;
  out.precision(6);
  out << "relative_l2=" << r.relative_l2 << " max_abs=" << r.max_abs << " interface_nodes=" << r.interface_nodes
      << " interface_mean_abs=" << r.interface_mean_abs << " bulk_mean_abs=" << r.bulk_mean_abs
      << " interface_share=" << r.interface_share;
  return out.str();
}

}  // namespace ctd
