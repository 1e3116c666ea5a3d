#pragma once

#include <optional>
#include <string>

#include "radarcs/frame.hpp"

namespace radarcs {

struct ExportOptions {
    /// Range to display; the paper figures show 62.625 m. unset: full range.
    std::optional<double> display_range_m = 62.625;
    bool cartesian = false;
    int cartesian_pixels = 801;  // square output, radar at the centre
};

/// 8-bit grayscale render with per-image max normalization (display only;
/// metrics never run on exported images).
void export_png(const PolarFrame& frame, const std::string& path,
                const ExportOptions& options = {});

}  // namespace radarcs
