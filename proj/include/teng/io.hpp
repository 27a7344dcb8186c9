#pragma once

#include <string>
#include <vector>

#include "teng/net.hpp"
#include "teng/spectral.hpp"

namespace teng {

// Checkpoint layout (little-endian):
//   magic "TENG" | u32 version=1 | u32 input_dim | u32 count=3 |
//   u32 embed_terms, hidden_dim, n_layers | u64 param_count | f64 values...
void save_checkpoint(const std::string& path, const NetworkArch& arch, const ParamVector& theta);
ParamVector load_checkpoint(const std::string& path, const NetworkArch& expected_arch);

// Reference file layout (little-endian):
//   magic "TREF" | u32 version=1 | u32 dims | u32 grid_n | u64 n_times |
//   u64 n_points | f64 times... | f64 fields (time-major)...
void save_reference(const std::string& path, const ReferenceSolution& ref, int dims);
ReferenceSolution load_reference(const std::string& path, int* dims_out = nullptr);

// Full-precision decimal (17 significant digits), round-trips exactly.
std::string format_full(double v);

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

} // namespace teng
