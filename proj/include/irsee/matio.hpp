#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "irsee/channel.hpp"

namespace irsee {

// Portable matrix container: one file holds named records, each a complex
// matrix stored row-major as little-endian (re, im) double pairs after an
// ASCII header line. Intended for cross-implementation regression dumps.
void save_matrices(const std::string& path,
                   const std::vector<std::pair<std::string, Eigen::MatrixXcd>>& records);

std::vector<std::pair<std::string, Eigen::MatrixXcd>> load_matrices(const std::string& path);

void save_realization(const std::string& path, const ChannelRealization& ch);
ChannelRealization load_realization(const std::string& path);

}  // namespace irsee
