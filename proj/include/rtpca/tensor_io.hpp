#pragma once

// Plain-text tensor files: the first line holds "N1 N2 N3", followed by the
// entries as whitespace-separated decimals in (n1 outer, n2 middle, n3 inner)
// order. Writers emit 17 significant digits so values round-trip exactly.

#include <filesystem>
#include <iosfwd>

#include "rtpca/tensor.hpp"

namespace rtpca {

Tensor3 read_tensor(std::istream& in);
void write_tensor(std::ostream& out, const Tensor3& t);

Tensor3 read_tensor_file(const std::filesystem::path& path);
void write_tensor_file(const std::filesystem::path& path, const Tensor3& t);

} // namespace rtpca
