#include "qdephase/io.hpp"

#include <array>
#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "qdephase/error.hpp"
#include "qdephase/interferometer.hpp"

namespace qdephase {

namespace {

void write_header(std::ostream& os, std::string_view header) {
  if (header.empty()) return;
  std::size_t start = 0;
  while (start <= header.size()) {
    const std::size_t end = header.find('\n', start);
    const auto line = header.substr(start, end == std::string_view::npos ? end : end - start);
    if (!(line.empty() && end == std::string_view::npos)) os << "# " << line << '\n';
    if (end == std::string_view::npos) break;
    start = end + 1;
  }
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  for (auto& tok : out) {
    while (!tok.empty() && (tok.front() == ' ' || tok.front() == '\t')) tok.remove_prefix(1);
    while (!tok.empty() && (tok.back() == ' ' || tok.back() == '\t' || tok.back() == '\r')) {
      tok.remove_suffix(1);
    }
  }
  return out;
}

}  // namespace

std::string format_double(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view token) {
  double v = 0.0;
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc() || res.ptr != token.data() + token.size() || token.empty()) {
    throw Error(ErrorCode::io, "not a number: '" + std::string(token) + "'");
  }
  return v;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryRecord& rec,
                          std::string_view header) {
  write_header(os, header);
  const bool noise = rec.has_noise();
  os << "t,X,Y,vX,vY,aX,aY" << (noise ? ",AX,AY" : "") << '\n';
  for (std::size_t j = 0; j < rec.size(); ++j) {
    os << format_double(rec.t[j]) << ',' << format_double(rec.x[j]) << ','
       << format_double(rec.y[j]) << ',' << format_double(rec.vx[j]) << ','
       << format_double(rec.vy[j]) << ',' << format_double(rec.ax[j]) << ','
       << format_double(rec.ay[j]);
    if (noise) os << ',' << format_double(rec.noise_x[j]) << ',' << format_double(rec.noise_y[j]);
    os << '\n';
  }
  if (!os) throw Error(ErrorCode::io, "failed writing trajectory CSV");
}

TrajectoryRecord read_trajectory_csv(std::istream& is) {
  TrajectoryRecord rec;
  std::string line;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#' || line == "\r") continue;
    const auto tok = split(line);
    if (columns == 0) {
      if (tok.size() == 7 && tok[0] == "t" && tok[6] == "aY") {
        columns = 7;
      } else if (tok.size() == 9 && tok[0] == "t" && tok[7] == "AX" && tok[8] == "AY") {
        columns = 9;
      } else {
        throw Error(ErrorCode::io, "trajectory CSV line " + std::to_string(line_no) +
                                       ": expected header t,X,Y,vX,vY,aX,aY[,AX,AY]");
      }
      continue;
    }
    if (tok.size() != columns) {
      throw Error(ErrorCode::io, "trajectory CSV line " + std::to_string(line_no) + ": expected " +
                                     std::to_string(columns) + " fields, got " +
                                     std::to_string(tok.size()));
    }
    std::array<double, 9> v{};
    for (std::size_t i = 0; i < columns; ++i) {
      try {
        v[i] = parse_double(tok[i]);
      } catch (const Error& e) {
        throw Error(ErrorCode::io,
                    "trajectory CSV line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    rec.t.push_back(v[0]);
    rec.x.push_back(v[1]);
    rec.y.push_back(v[2]);
    rec.vx.push_back(v[3]);
    rec.vy.push_back(v[4]);
    rec.ax.push_back(v[5]);
    rec.ay.push_back(v[6]);
    if (columns == 9) {
      rec.noise_x.push_back(v[7]);
      rec.noise_y.push_back(v[8]);
    }
  }
  if (columns == 0) throw Error(ErrorCode::io, "trajectory CSV: no header row");
  return rec;
}

void write_spectrum_csv(std::ostream& os, const EstimatedSpectrum& s, std::string_view header) {
  write_header(os, header);
  os << "omega,Sxx,Syy,ReSxy,ImSxy,n_avg\n";
  for (std::size_t j = 0; j < s.size(); ++j) {
    os << format_double(s.omega[j]) << ',' << format_double(s.sxx[j]) << ','
       << format_double(s.syy[j]) << ',' << format_double(s.sxy[j].real()) << ','
       << format_double(s.sxy[j].imag()) << ',' << s.n_averages << '\n';
  }
  if (!os) throw Error(ErrorCode::io, "failed writing spectrum CSV");
}

void write_analytic_spectrum_csv(std::ostream& os, const CrossSpectralMatrix& s, double omega0,
                                 std::string_view header) {
  write_header(os, header);
  os << "omega,Sxx,Syy,ReSxy,ImSxy,F0\n";
  for (std::size_t j = 0; j < s.omega.size(); ++j) {
    os << format_double(s.omega[j]) << ',' << format_double(s.sxx[j]) << ','
       << format_double(s.syy[j]) << ',' << format_double(s.sxy[j].real()) << ','
       << format_double(s.sxy[j].imag()) << ',' << format_double(transfer_f0(s.omega[j], omega0))
       << '\n';
  }
  if (!os) throw Error(ErrorCode::io, "failed writing spectrum CSV");
}

}  // namespace qdephase
