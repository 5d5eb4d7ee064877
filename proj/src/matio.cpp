#include "irsee/matio.hpp"

#include <bit>
#include <fstream>
#include <sstream>
#include <stdexcept>

static_assert(std::endian::native == std::endian::little,
              "matrix dump format assumes a little-endian host");

namespace irsee {

namespace {

void write_matrix(std::ofstream& out, const std::string& name, const Eigen::MatrixXcd& m) {
  out << name << " " << m.rows() << " " << m.cols() << "\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double re = m(r, c).real(), im = m(r, c).imag();
      out.write(reinterpret_cast<const char*>(&re), sizeof re);
      out.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
}

}  // namespace

void save_matrices(const std::string& path,
                   const std::vector<std::pair<std::string, Eigen::MatrixXcd>>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "IRSEEMAT 1 " << records.size() << "\n";
  for (const auto& [name, m] : records) write_matrix(out, name, m);
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<std::pair<std::string, Eigen::MatrixXcd>> load_matrices(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string magic;
  int version = 0;
  std::size_t count = 0;
  in >> magic >> version >> count;
  in.ignore(1, '\n');
  if (magic != "IRSEEMAT" || version != 1)
    throw std::runtime_error("not an IRSEEMAT v1 file: " + path);
  std::vector<std::pair<std::string, Eigen::MatrixXcd>> records;
  records.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::string name;
    Eigen::Index rows = 0, cols = 0;
    in >> name >> rows >> cols;
    in.ignore(1, '\n');
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) {
        double re = 0.0, im = 0.0;
        in.read(reinterpret_cast<char*>(&re), sizeof re);
        in.read(reinterpret_cast<char*>(&im), sizeof im);
        m(r, c) = {re, im};
      }
    if (!in) throw std::runtime_error("truncated matrix file: " + path);
    records.emplace_back(std::move(name), std::move(m));
  }
  return records;
}

void save_realization(const std::string& path, const ChannelRealization& ch) {
  std::vector<std::pair<std::string, Eigen::MatrixXcd>> recs;
  recs.emplace_back("g_r", ch.g_r);
  recs.emplace_back("g_d", ch.g_d_mat);
  for (std::size_t k = 0; k < ch.h_r_users.size(); ++k)
    recs.emplace_back("h_r_user_" + std::to_string(k), ch.h_r_users[k]);
  for (std::size_t k = 0; k < ch.h_r_devices.size(); ++k)
    recs.emplace_back("h_r_device_" + std::to_string(k), ch.h_r_devices[k]);
  for (std::size_t k = 0; k < ch.g_dir_users.size(); ++k)
    recs.emplace_back("g_dir_user_" + std::to_string(k), ch.g_dir_users[k]);
  for (std::size_t k = 0; k < ch.g_dir_devices.size(); ++k)
    recs.emplace_back("g_dir_device_" + std::to_string(k), ch.g_dir_devices[k]);
  save_matrices(path, recs);
}

ChannelRealization load_realization(const std::string& path) {
  ChannelRealization ch;
  for (auto& [name, m] : load_matrices(path)) {
    if (name == "g_r")
      ch.g_r = std::move(m);
    else if (name == "g_d")
      ch.g_d_mat = std::move(m);
    else if (name.rfind("h_r_user_", 0) == 0)
      ch.h_r_users.push_back(std::move(m));
    else if (name.rfind("h_r_device_", 0) == 0)
      ch.h_r_devices.push_back(std::move(m));
    else if (name.rfind("g_dir_user_", 0) == 0)
      ch.g_dir_users.push_back(std::move(m));
    else if (name.rfind("g_dir_device_", 0) == 0)
      ch.g_dir_devices.push_back(std::move(m));
    else
      throw std::runtime_error("unknown record '" + name + "' in " + path);
  }
  return ch;
}

}  // namespace irsee
