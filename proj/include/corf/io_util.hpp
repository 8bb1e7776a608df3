#pragma once

#include <cstdint>
#include <string>

namespace corf {

/// Writes bytes to a temp file in the target directory, then renames.
void write_file_atomic(const std::string& path, const std::string& bytes);

std::string read_file(const std::string& path);

/// FNV-1a 64-bit content hash, used in run manifests.
std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace corf
