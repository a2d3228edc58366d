#pragma once

#include <string>

#include "ctd/field.hpp"

namespace ctd {

struct CompareReport {
  double relative_l2 = 0.0;  // ||a - b|| / ||b||
  double max_abs = 0.0;
  /// Nodes where the reference lies strictly inside (-band, band), i.e. in a
  /// diffuse interface rather than a bulk phase.
  double interface_band = 0.9;
  std::size_t interface_nodes = 0;
  double interface_mean_abs = 0.0;
  double bulk_mean_abs = 0.0;
  /// Share of the squared difference carried by interface nodes.
  double interface_share = 0.0;
  FullField difference;  // |a - b|
};

CompareReport compare_fields(const FullField& a, const FullField& b, double interface_band = 0.9);

std::string summary_line(const CompareReport& report);

}  // namespace ctd
