#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sjl/dataset.hpp"
#include "sjl/distribution.hpp"

// Random projection matrices A = scale * (zeta .* T), where T has iid entries
// from a unit-variance law, zeta is an independent Bernoulli(q_mask) mask, and
// scale = 1/sqrt(d * q_mask). E ||A y||^2 = ||y||^2 for every y regardless of
// the mask level.

namespace sjl {

enum class Storage : std::uint8_t { dense = 0, csr = 1 };

struct ProjectionMeta {
  DistributionSpec spec;
  double q_mask = 1.0;
  std::uint64_t seed = 0;

  bool operator==(const ProjectionMeta&) const = default;
};

class ProjectionMatrix {
 public:
  // Draws the d x p matrix. Entry (i, k) is a pure function of (seed, i*p+k),
  // with the mask and the value on separate streams, so the mask tells you
  // nothing about the value it kept. Storage is CSR when the expected
  // fraction of structural nonzeros, q_mask * P(value != 0), is below 1/2.
  // threads only partitions work; output is identical for any thread count.
  static ProjectionMatrix generate(const DistributionSpec& spec, std::size_t d, std::size_t p,
                                   double q_mask, std::uint64_t seed, unsigned threads = 1);

  // Wraps explicit row-major values as a dense projection (tests, adapters).
  static ProjectionMatrix from_dense(std::size_t d, std::size_t p, std::vector<double> values,
                                     double scale = 1.0, ProjectionMeta meta = {});

  std::size_t d() const { return d_; }
  std::size_t p() const { return p_; }
  Storage storage() const { return storage_; }
  double scale() const { return scale_; }
  const ProjectionMeta& meta() const { return meta_; }

  std::size_t nnz() const;
  double density() const { return static_cast<double>(nnz()) / (static_cast<double>(d_) * static_cast<double>(p_)); }

  // Y = A y. Within a row, terms are summed in ascending column order for
  // both storage kinds, so dense and CSR agree on the same logical matrix.
  std::vector<double> apply(const std::vector<double>& y) const;

  // Projects every point; row i of the result is A x_i.
  DataSet apply_dataset(const DataSet& data, unsigned threads = 1) const;

  // Same logical matrix, dense storage.
  ProjectionMatrix densified() const;

  // Container format (little-endian): magic "SPJL", u32 version, u64 d,
  // u64 p, u8 storage, f64 scale, u32 length + JSON metadata, payload,
  // u32 CRC-32 of all preceding bytes. Payload is f64[d*p] for dense;
  // u64 nnz, u64 offsets[d+1], u64 cols[nnz], f64 vals[nnz] for CSR.
  void save(const std::string& path) const;
  static ProjectionMatrix load(const std::string& path);
  std::vector<std::uint8_t> to_bytes() const;
  static ProjectionMatrix from_bytes(const std::vector<std::uint8_t>& bytes);

  bool operator==(const ProjectionMatrix&) const = default;

  // Unscaled entry payloads; see apply() for how scale_ enters.
  const std::vector<double>& dense_values() const { return dense_; }
  const std::vector<std::uint64_t>& csr_offsets() const { return offsets_; }
  const std::vector<std::uint64_t>& csr_cols() const { return cols_; }
  const std::vector<double>& csr_vals() const { return vals_; }

 private:
  std::size_t d_ = 0, p_ = 0;
  Storage storage_ = Storage::dense;
  double scale_ = 1.0;
  ProjectionMeta meta_;
  std::vector<double> dense_;           // dense payload, d*p row-major
  std::vector<std::uint64_t> offsets_;  // CSR payload
  std::vector<std::uint64_t> cols_;
  std::vector<double> vals_;
};

}  // namespace sjl
