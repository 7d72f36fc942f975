#ifndef TENKRYLOV_IO_HPP
#define TENKRYLOV_IO_HPP

#include "tenkrylov/sources.hpp"
#include "tenkrylov/types.hpp"

#include <memory>
#include <string>

namespace tenkrylov {

enum class TensorFormat { dense, coo, canonical, tucker };

TensorFormat parse_format(const std::string& name);
const char* to_string(TensorFormat f);

/// Text formats (whitespace separated, 0-based indices):
///   dense:     "n1 n2 n3" then n1*n2*n3 values in storage order (first index fastest)
///   coo:       "n1 n2 n3 nnz" then nnz lines "i j k value"; a five-integer
///              header "n1 n2 m1 m2 nnz" selects the 4-index variant whose last
///              two indices (p, q) fold into one mode of size m1*m2 as p + m1*q
///   canonical: "n1 n2 n3 R" then the three factors, one row per line
///   tucker:    "n1 n2 n3 r1 r2 r3" then core values in storage order, then the
///              three factors, one row per line
/// A binary variant starts with the magic bytes "TKV1" followed by a format
/// tag, 64-bit dimensions and little-endian 64-bit floats; loaders detect it
/// by the magic. Parse failures report the offending line.
DenseTensor3 load_dense(const std::string& path);
SparseTensor3 load_coo(const std::string& path);
CanonicalTensor load_canonical(const std::string& path);
TuckerTensor load_tucker(const std::string& path);

std::unique_ptr<TenvecSource> load_tensor(const std::string& path, TensorFormat format);

void save_dense(const std::string& path, const DenseTensor3& t, bool binary = false);
void save_coo(const std::string& path, const SparseTensor3& t, bool binary = false);
void save_canonical(const std::string& path, const CanonicalTensor& t, bool binary = false);
void save_tucker(const std::string& path, const TuckerTensor& t, bool binary = false);

}  // namespace tenkrylov

#endif
