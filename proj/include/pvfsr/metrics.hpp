#pragma once

#include <vector>

#include "pvfsr/design.hpp"

namespace pvfsr {

struct SelectionOutcome {
    IndexSet selected;
    IndexSet truth;
};

/// |selected \ truth| / max(|selected|, 1).
double fsr_of(const SelectionOutcome& o);

/// |selected & truth| / |truth|. With an empty truth set: 1 if nothing was
/// selected, 0 otherwise.
double tsr_of(const SelectionOutcome& o);

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;  ///< sample sd / sqrt(count)
};

MeanSe mean_se(const std::vector<double>& values);

}  // namespace pvfsr
