#include "npi/io.hpp"

#include <array>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace npi {

std::string format_double(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v,
                                 std::chars_format::general, 17);
  if (ec != std::errc()) throw std::runtime_error("format_double failed");
  return std::string(buf.data(), ptr);
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out = "t,y,u,u_nom,z\n";
  out.reserve(out.size() + traj.size() * 5 * 24);
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out += format_double(traj.t[i]);
    out += ',';
    out += format_double(traj.y[i]);
    out += ',';
    out += format_double(traj.u[i]);
    out += ',';
    out += format_double(traj.u_nom[i]);
    out += ',';
    out += format_double(traj.z[i]);
    out += '\n';
  }
  return out;
}

Trajectory parse_trajectory_csv(std::string_view text) {
  Trajectory traj;
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || line != "t,y,u,u_nom,z")
    throw std::runtime_error("trajectory csv: bad header");
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    std::array<double, 5> v{};
    const char* p = line.data();
    const char* end = line.data() + line.size();
    for (std::size_t c = 0; c < v.size(); ++c) {
      auto [next, ec] = std::from_chars(p, end, v[c]);
      if (ec != std::errc()) throw std::runtime_error("trajectory csv: bad number on row " + std::to_string(row));
      p = next;
      if (c + 1 < v.size()) {
        if (p == end || *p != ',') throw std::runtime_error("trajectory csv: missing column on row " + std::to_string(row));
        ++p;
      }
    }
    if (p != end) throw std::runtime_error("trajectory csv: trailing data on row " + std::to_string(row));
    traj.t.push_back(v[0]);
    traj.y.push_back(v[1]);
    traj.u.push_back(v[2]);
    traj.u_nom.push_back(v[3]);
    traj.z.push_back(v[4]);
  }
  return traj;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot rename into " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace npi
