#include "seabed/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "seabed/errors.hpp"

namespace seabed {
namespace {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_text_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out << content;
    if (!out) throw IoError("write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("rename " + tmp + " -> " + path + ": " + ec.message());
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_field_csv(const std::string& path, const ScalarField& field) {
  std::ostringstream out;
  out << "x,value\n";
  const Grid1D& g = field.grid();
  for (int i = 0; i < g.n; ++i)
    out << format_double(g.x(i)) << ',' << format_double(field[i]) << '\n';
  write_text_atomic(path, out.str());
}

ScalarField read_field_csv(const std::string& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line) || line.rfind("x,value", 0) != 0)
    throw IoError(path + ": expected header x,value");
  std::vector<double> xs, vs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const size_t comma = line.find(',');
    if (comma == std::string::npos) throw IoError(path + ": malformed row '" + line + "'");
    xs.push_back(std::stod(line.substr(0, comma)));
    vs.push_back(std::stod(line.substr(comma + 1)));
  }
  if (xs.size() < 2) throw IoError(path + ": too few rows");
  Grid1D grid{xs.front(), xs.back(), static_cast<int>(xs.size())};
  ScalarField f(grid);
  for (size_t i = 0; i < vs.size(); ++i) {
    if (std::abs(xs[i] - grid.x(static_cast<int>(i))) > 1e-9 * std::max(1.0, grid.length()))
      throw IoError(path + ": x column is not a uniform grid");
    f[static_cast<int>(i)] = vs[i];
  }
  return f;
}

void write_potential_csv(const std::string& path, const PotentialField& phi) {
  std::ostringstream out;
  out << "x,sigma,y,phi\n";
  const SigmaMap& m = phi.map();
  const Grid1D& g = m.grid();
  for (int j = 0; j < m.n_sigma; ++j)
    for (int i = 0; i < g.n; ++i)
      out << format_double(g.x(i)) << ',' << format_double(m.sigma(j)) << ','
          << format_double(m.y(i, j)) << ',' << format_double(phi.u(i, j)) << '\n';
  write_text_atomic(path, out.str());
}

void write_trace_csv(const std::string& path, const SigmaMap& map, const LateralTrace& trace) {
  std::ostringstream out;
  out << "sigma,left,right\n";
  for (int j = 0; j < map.n_sigma; ++j)
    out << format_double(map.sigma(j)) << ',' << format_double(trace.left[j]) << ','
        << format_double(trace.right[j]) << '\n';
  write_text_atomic(path, out.str());
}

LateralTrace read_trace_csv(const std::string& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line) || line.rfind("sigma,left,right", 0) != 0)
    throw IoError(path + ": expected header sigma,left,right");
  LateralTrace t;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const size_t c1 = line.find(',');
    const size_t c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c2 == std::string::npos) throw IoError(path + ": malformed row '" + line + "'");
    t.left.push_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)));
    t.right.push_back(std::stod(line.substr(c2 + 1)));
  }
  if (t.left.size() < 4) throw IoError(path + ": too few sigma layers");
  return t;
}

void write_measurement_manifest(const std::string& path, const MeasurementFiles& m) {
  nlohmann::json j;
  j["t0"] = m.t0;
  j["b_left"] = m.b_left;
  j["b_right"] = m.b_right;
  j["files"] = {{"zeta", m.zeta}, {"psi", m.psi}, {"dtzeta", m.dtzeta}, {"theta", m.theta}};
  write_text_atomic(path, j.dump(2) + "\n");
}

MeasurementFiles read_measurement_manifest(const std::string& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  MeasurementFiles m;
  try {
    m.t0 = j.at("t0").get<double>();
    m.b_left = j.at("b_left").get<double>();
    m.b_right = j.at("b_right").get<double>();
    m.zeta = j.at("files").at("zeta").get<std::string>();
    m.psi = j.at("files").at("psi").get<std::string>();
    m.dtzeta = j.at("files").at("dtzeta").get<std::string>();
    m.theta = j.at("files").at("theta").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path + ": " + e.what());
  }
  return m;
}

}  // namespace seabed
