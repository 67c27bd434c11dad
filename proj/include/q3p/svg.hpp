#pragma once

#include <string>

#include "q3p/emulator.hpp"

namespace q3p {

// Bar chart of the `max_bars` most frequent bitstrings. The winner bar is
// drawn in orange and named in the <metadata> block.
std::string histogram_svg(const SampleHistogram& histogram, const std::string& winner,
                          std::size_t max_bars = 20);

// Heatmap of a landscape, detuning on the vertical axis.
std::string landscape_svg(const Landscape& landscape);

}  // namespace q3p
