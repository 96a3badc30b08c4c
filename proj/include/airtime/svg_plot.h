// Static SVG of a cell's per-window series with the capacity line and the
// tracking band around it.

#ifndef AIRTIME_SVG_PLOT_H_
#define AIRTIME_SVG_PLOT_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "airtime/harness.h"

namespace airtime {

void WriteCellSvg(std::ostream& out, const std::string& title,
                  const std::vector<WindowRow>& rows, double capacity_bps,
                  double band);

}  // namespace airtime

#endif  // AIRTIME_SVG_PLOT_H_
