#include "pvfsr/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

namespace pvfsr {
namespace {

std::size_t overlap(const IndexSet& a, const IndexSet& b) {
    IndexSet both;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
    return both.size();
}

}  // namespace

double fsr_of(const SelectionOutcome& o) {
    const std::size_t sel = o.selected.size();
    const std::size_t false_sel = sel - overlap(o.selected, o.truth);
    return static_cast<double>(false_sel) / static_cast<double>(std::max<std::size_t>(sel, 1));
}

double tsr_of(const SelectionOutcome& o) {
    if (o.truth.empty()) return o.selected.empty() ? 1.0 : 0.0;
    return static_cast<double>(overlap(o.selected, o.truth)) / static_cast<double>(o.truth.size());
}

MeanSe mean_se(const std::vector<double>& v) {
    MeanSe out;
    if (v.empty()) return out;
    double s = 0.0;
    for (double x : v) s += x;
    out.mean = s / static_cast<double>(v.size());
    if (v.size() < 2) return out;
    double ss = 0.0;
    for (double x : v) ss += (x - out.mean) * (x - out.mean);
    out.se = std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
    return out;
}

}  // namespace pvfsr
