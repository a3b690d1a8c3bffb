#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "thermoform/cli.hpp"

namespace thermoform::cli {

namespace {

std::string quoted(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  file << content;
  file.close();
  if (!file) throw Error(ErrorCode::IoError, "failed writing '" + path + "'");
}

std::string fixed(double x, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string short_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

}  // namespace

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%#.12g", x);
  return buf;
}

std::string to_csv(const CsvTable& table) {
  if (table.header.empty() || table.rows.empty()) throw Error(ErrorCode::InvalidArgument, "nothing to write: the table has no rows");
  std::string out;
  auto line = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out += ',';
      out += quoted(fields[i]);
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) {
    if (row.size() != table.header.size()) throw Error(ErrorCode::InvalidArgument, "row width differs from the header");
    line(row);
  }
  return out;
}

void write_csv(const CsvTable& table, const std::string& path) { write_file(path, to_csv(table)); }

std::string render_sweep_svg(const BetaSweep& sweep) {
  const std::size_t n = sweep.betas.size();
  if (n < 2 || sweep.pressures.size() != n) throw Error(ErrorCode::InvalidArgument, "a sweep plot needs at least two points");

  std::vector<double> line(n);
  for (std::size_t i = 0; i < n; ++i) line[i] = sweep.betas[i] * sweep.max_ratio + sweep.h_inf;

  constexpr double left = 80, right = 770, top = 50, bottom = 440;
  const double x0 = sweep.betas.front(), x1 = sweep.betas.back();
  double y0 = std::min(*std::min_element(sweep.pressures.begin(), sweep.pressures.end()),
                       *std::min_element(line.begin(), line.end()));
  double y1 = std::max(*std::max_element(sweep.pressures.begin(), sweep.pressures.end()),
                       *std::max_element(line.begin(), line.end()));
  if (y1 - y0 < 1e-12) {
    y0 -= 0.5;
    y1 += 0.5;
  }
  const double xspan = x1 > x0 ? x1 - x0 : 1.0;
  auto px = [&](double b) { return left + (b - x0) / xspan * (right - left); };
  auto py = [&](double v) { return bottom - (v - y0) / (y1 - y0) * (bottom - top); };
  auto points = [&](const std::vector<double>& ys) {
    std::string s;
    for (std::size_t i = 0; i < n; ++i) {
      if (i) s += ' ';
      s += fixed(px(sweep.betas[i])) + "," + fixed(py(ys[i]));
    }
    return s;
  };

  std::size_t widest = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (sweep.pressures[i] - line[i] > sweep.pressures[widest] - line[widest]) widest = i;
  const double gap = sweep.pressures[widest] - line[widest];

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" viewBox=\"0 0 800 500\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"white\"/>\n"
      << "<text x=\"400\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << "induced pressure of βφ against β·Max + h∞</text>\n"
      << "<g stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << left << "\" y1=\"" << bottom << "\" x2=\"" << right << "\" y2=\"" << bottom << "\"/>\n"
      << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << bottom << "\"/>\n"
      << "</g>\n"
      << "<g font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<text x=\"" << left << "\" y=\"" << bottom + 18 << "\" text-anchor=\"middle\">" << short_number(x0) << "</text>\n"
      << "<text x=\"" << right << "\" y=\"" << bottom + 18 << "\" text-anchor=\"middle\">" << short_number(x1) << "</text>\n"
      << "<text x=\"" << (left + right) / 2 << "\" y=\"" << bottom + 40 << "\" text-anchor=\"middle\">β</text>\n"
      << "<text x=\"" << left - 8 << "\" y=\"" << fixed(bottom + 4) << "\" text-anchor=\"end\">" << short_number(y0) << "</text>\n"
      << "<text x=\"" << left - 8 << "\" y=\"" << fixed(top + 4) << "\" text-anchor=\"end\">" << short_number(y1) << "</text>\n"
      << "</g>\n"
      << "<polyline id=\"pressure\" fill=\"none\" stroke=\"#1f5fa8\" stroke-width=\"2\" points=\"" << points(sweep.pressures)
      << "\"/>\n"
      << "<polyline id=\"asymptote\" fill=\"none\" stroke=\"#c0392b\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\" points=\""
      << points(line) << "\"/>\n"
      << "<line id=\"gap\" x1=\"" << fixed(px(sweep.betas[widest])) << "\" y1=\"" << fixed(py(line[widest])) << "\" x2=\""
      << fixed(px(sweep.betas[widest])) << "\" y2=\"" << fixed(py(sweep.pressures[widest]))
      << "\" stroke=\"#555555\" stroke-width=\"1\"/>\n"
      << "<g font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<text x=\"" << right - 10 << "\" y=\"" << top + 16 << "\" text-anchor=\"end\">largest gap " << short_number(gap)
      << " at β = " << short_number(sweep.betas[widest]) << "</text>\n"
      << "<text x=\"" << right - 10 << "\" y=\"" << top + 34 << "\" text-anchor=\"end\" fill=\"#1f5fa8\">pressure</text>\n"
      << "<text x=\"" << right - 10 << "\" y=\"" << top + 52 << "\" text-anchor=\"end\" fill=\"#c0392b\">Max = "
      << short_number(sweep.max_ratio) << ", h∞ = " << short_number(sweep.h_inf) << "</text>\n"
      << "</g>\n"
      << "</svg>\n";
  return svg.str();
}

void write_sweep_svg(const BetaSweep& sweep, const std::string& path) { write_file(path, render_sweep_svg(sweep)); }

}  // namespace thermoform::cli
