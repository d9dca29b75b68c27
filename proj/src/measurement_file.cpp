#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "tigre/errors.hpp"
#include "tigre/io.hpp"

namespace tigre {

namespace {

constexpr std::string_view kMagic = "# tigre measurement v1";

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

double to_double(const std::string& text, int line) {
  const std::string t = trim(text);
  if (t == "inf") return std::numeric_limits<double>::infinity();
  if (t == "-inf") return -std::numeric_limits<double>::infinity();
  if (t == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ParseError("invalid number '" + t + "'", line);
  }
  return v;
}

std::uint64_t to_u64(const std::string& text, int line, int base = 10) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v, base);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ParseError("invalid integer '" + t + "'", line);
  }
  return v;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return fmt::format("{:.17g}", value);
}

void write_measurement(std::ostream& out, const MeasurementFile& file) {
  out << kMagic << "\n";
  out << "# n_tx=" << file.radar.n_tx << "\n";
  out << "# n_rx=" << file.radar.n_rx << "\n";
  out << "# tx_spacing=" << format_double(file.radar.tx_spacing) << "\n";
  out << "# rx_spacing=" << format_double(file.radar.rx_spacing) << "\n";
  out << "# grid_deg=";
  for (std::size_t g = 0; g < file.grid.size(); ++g) out << (g ? ";" : "") << format_double(file.grid[g]);
  out << "\n";
  out << "# snr_db=" << format_double(file.measurement.snr_db) << "\n";
  out << "# noise_sigma=" << format_double(file.measurement.noise_sigma) << "\n";
  out << "# seed=" << file.seed << "\n";
  out << "# config_hash=" << fmt::format("{:016x}", file.config_hash) << "\n";
  out << "real,imag\n";
  for (Eigen::Index k = 0; k < file.measurement.y.size(); ++k) {
    out << format_double(file.measurement.y[k].real()) << "," << format_double(file.measurement.y[k].imag()) << "\n";
  }
}

MeasurementFile read_measurement(std::istream& in) {
  std::string text;
  int line_no = 0;
  if (!std::getline(in, text) || trim(text) != kMagic) {
    throw ParseError("not a measurement file (missing '" + std::string(kMagic) + "' header)", 1);
  }
  ++line_no;

  std::map<std::string, std::pair<std::string, int>> header;
  bool have_columns = false;
  while (std::getline(in, text)) {
    ++line_no;
    const std::string t = trim(text);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const auto eq = t.find('=');
      if (eq == std::string::npos) throw ParseError("header line without '='", line_no);
      const std::string key = trim(t.substr(1, eq - 1));
      if (header.count(key)) throw ParseError("duplicate header key '" + key + "'", line_no);
      header[key] = {t.substr(eq + 1), line_no};
      continue;
    }
    if (t != "real,imag") throw ParseError("expected column header 'real,imag'", line_no);
    have_columns = true;
    break;
  }
  if (!have_columns) throw ParseError("missing 'real,imag' column header", line_no);

  static const char* required[] = {"n_tx", "n_rx", "tx_spacing", "rx_spacing", "grid_deg",
                                   "snr_db", "noise_sigma", "seed", "config_hash"};
  for (const char* k : required) {
    if (!header.count(k)) throw ParseError(std::string("missing header key '") + k + "'");
  }
  for (const auto& [k, v] : header) {
    bool known = false;
    for (const char* r : required) known = known || k == r;
    if (!known) throw ParseError("unknown header key '" + k + "'", v.second);
  }

  MeasurementFile f;
  const auto get = [&](const char* k) -> const std::pair<std::string, int>& { return header.at(k); };
  f.radar.n_tx = static_cast<int>(to_u64(get("n_tx").first, get("n_tx").second));
  f.radar.n_rx = static_cast<int>(to_u64(get("n_rx").first, get("n_rx").second));
  f.radar.tx_spacing = to_double(get("tx_spacing").first, get("tx_spacing").second);
  f.radar.rx_spacing = to_double(get("rx_spacing").first, get("rx_spacing").second);
  std::vector<double> angles;
  {
    std::stringstream ss(get("grid_deg").first);
    std::string item;
    while (std::getline(ss, item, ';')) angles.push_back(to_double(item, get("grid_deg").second));
  }
  f.measurement.snr_db = to_double(get("snr_db").first, get("snr_db").second);
  f.measurement.noise_sigma = to_double(get("noise_sigma").first, get("noise_sigma").second);
  f.seed = to_u64(get("seed").first, get("seed").second);
  f.config_hash = to_u64(get("config_hash").first, get("config_hash").second, 16);
  try {
    f.radar.validate();
    f.grid = AngleGrid(std::move(angles));
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }

  std::vector<Complex> values;
  while (std::getline(in, text)) {
    ++line_no;
    const std::string t = trim(text);
    if (t.empty()) continue;
    const auto comma = t.find(',');
    if (comma == std::string::npos) throw ParseError("expected 'real,imag'", line_no);
    values.emplace_back(to_double(t.substr(0, comma), line_no), to_double(t.substr(comma + 1), line_no));
    if (!std::isfinite(values.back().real()) || !std::isfinite(values.back().imag())) {
      throw ParseError("measurement value is not finite", line_no);
    }
  }
  if (static_cast<int>(values.size()) != f.radar.channels()) {
    throw ParseError("expected " + std::to_string(f.radar.channels()) + " rows (n_tx * n_rx), found " +
                     std::to_string(values.size()));
  }
  f.measurement.y = Eigen::Map<const CVector>(values.data(), static_cast<Eigen::Index>(values.size()));
  return f;
}

MeasurementFile load_measurement_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open measurement file '" + path.string() + "'");
  try {
    return read_measurement(in);
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace tigre
