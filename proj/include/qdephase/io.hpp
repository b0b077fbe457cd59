#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "qdephase/langevin.hpp"
#include "qdephase/noise_model.hpp"
#include "qdephase/spectral.hpp"

namespace qdephase {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Parses a full token; throws Error(io) otherwise.
double parse_double(std::string_view token);

// Every writer prefixes each line of `header` with "# ". Readers skip '#'
// lines.

/// Columns t,X,Y,vX,vY,aX,aY[,AX,AY].
void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& rec,
                          std::string_view header);
TrajectoryRecord read_trajectory_csv(std::istream& is);

/// Columns omega,Sxx,Syy,ReSxy,ImSxy,n_avg.
void write_spectrum_csv(std::ostream& os, const EstimatedSpectrum& s,
                        std::string_view header);

/// Columns omega,Sxx,Syy,ReSxy,ImSxy,F0 (F0 at trap frequency omega0).
void write_analytic_spectrum_csv(std::ostream& os, const CrossSpectralMatrix& s,
                                 double omega0, std::string_view header);

}  // namespace qdephase
