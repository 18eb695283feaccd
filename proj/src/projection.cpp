#include "sjl/projection.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

#include "sjl/io.hpp"
#include "sjl/parallel.hpp"

namespace sjl {

namespace {

constexpr char kMagic[4] = {'S', 'P', 'J', 'L'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

ProjectionMatrix ProjectionMatrix::generate(const DistributionSpec& spec, std::size_t d,
                                            std::size_t p, double q_mask, std::uint64_t seed,
                                            unsigned threads) {
  if (d == 0 || p == 0) throw std::invalid_argument("projection dimensions must be positive");
  if (!(q_mask > 0.0 && q_mask <= 1.0)) throw std::invalid_argument("q_mask must lie in (0, 1]");

  ProjectionMatrix A;
  A.d_ = d;
  A.p_ = p;
  A.meta_ = ProjectionMeta{spec, q_mask, seed};
  A.scale_ = q_mask == 1.0 ? 1.0 / std::sqrt(static_cast<double>(d))
                           : 1.0 / std::sqrt(static_cast<double>(d) * q_mask);

  const rng::Counter mask_gen(seed, rng::Stream::matrix_mask);
  const rng::Counter value_gen(seed, rng::Stream::matrix_value);
  const bool masked = q_mask < 1.0;
  const double density = q_mask * spec.p_nonzero();
  A.storage_ = density < 0.5 ? Storage::csr : Storage::dense;

  if (A.storage_ == Storage::dense) {
    A.dense_.assign(d * p, 0.0);
    parallel_for(d, threads, [&](std::size_t i) {
      double* out = A.dense_.data() + i * p;
      for (std::size_t k = 0; k < p; ++k) {
        const std::uint64_t idx = i * p + k;
        if (masked && mask_gen.u01(idx) >= q_mask) continue;
        out[k] = spec.sample(value_gen, idx);
      }
    });
    return A;
  }

  // CSR: fill rows independently, then stitch in row order so the layout
  // never depends on the thread count.
  std::vector<std::vector<std::uint64_t>> row_cols(d);
  std::vector<std::vector<double>> row_vals(d);
  parallel_for(d, threads, [&](std::size_t i) {
    for (std::size_t k = 0; k < p; ++k) {
      const std::uint64_t idx = i * p + k;
      if (masked && mask_gen.u01(idx) >= q_mask) continue;
      const double v = spec.sample(value_gen, idx);
      if (v == 0.0) continue;
      row_cols[i].push_back(k);
      row_vals[i].push_back(v);
    }
  });
  A.offsets_.assign(d + 1, 0);
  for (std::size_t i = 0; i < d; ++i) A.offsets_[i + 1] = A.offsets_[i] + row_cols[i].size();
  A.cols_.reserve(A.offsets_[d]);
  A.vals_.reserve(A.offsets_[d]);
  for (std::size_t i = 0; i < d; ++i) {
    A.cols_.insert(A.cols_.end(), row_cols[i].begin(), row_cols[i].end());
    A.vals_.insert(A.vals_.end(), row_vals[i].begin(), row_vals[i].end());
  }
  return A;
}

ProjectionMatrix ProjectionMatrix::from_dense(std::size_t d, std::size_t p,
                                              std::vector<double> values, double scale,
                                              ProjectionMeta meta) {
  if (d == 0 || p == 0) throw std::invalid_argument("projection dimensions must be positive");
  if (values.size() != d * p) throw std::invalid_argument("values size does not match d * p");
  ProjectionMatrix A;
  A.d_ = d;
  A.p_ = p;
  A.storage_ = Storage::dense;
  A.scale_ = scale;
  A.meta_ = std::move(meta);
  A.dense_ = std::move(values);
  return A;
}

std::size_t ProjectionMatrix::nnz() const {
  if (storage_ == Storage::csr) return cols_.size();
  std::size_t count = 0;
  for (double v : dense_) count += v != 0.0;
  return count;
}

std::vector<double> ProjectionMatrix::apply(const std::vector<double>& y) const {
  if (y.size() != p_) throw std::invalid_argument("apply: vector length does not match p");
  std::vector<double> out(d_);
  if (storage_ == Storage::dense) {
    for (std::size_t i = 0; i < d_; ++i) {
      const double* a = dense_.data() + i * p_;
      double acc = 0.0;
      for (std::size_t k = 0; k < p_; ++k) acc += a[k] * y[k];
      out[i] = scale_ * acc;
    }
  } else {
    for (std::size_t i = 0; i < d_; ++i) {
      double acc = 0.0;
      for (std::uint64_t t = offsets_[i]; t < offsets_[i + 1]; ++t) {
        acc += vals_[t] * y[cols_[t]];
      }
      out[i] = scale_ * acc;
    }
  }
  return out;
}

DataSet ProjectionMatrix::apply_dataset(const DataSet& data, unsigned threads) const {
  if (data.p() != p_) throw std::invalid_argument("apply_dataset: point dimension does not match p");
  std::vector<double> out(data.n() * d_);
  parallel_for(data.n(), threads, [&](std::size_t i) {
    const std::vector<double> y(data.row(i), data.row(i) + p_);
    const std::vector<double> img = apply(y);
    std::memcpy(out.data() + i * d_, img.data(), d_ * sizeof(double));
  });
  return DataSet(data.n(), d_, std::move(out));
}

ProjectionMatrix ProjectionMatrix::densified() const {
  if (storage_ == Storage::dense) return *this;
  ProjectionMatrix A;
  A.d_ = d_;
  A.p_ = p_;
  A.storage_ = Storage::dense;
  A.scale_ = scale_;
  A.meta_ = meta_;
  A.dense_.assign(d_ * p_, 0.0);
  for (std::size_t i = 0; i < d_; ++i) {
    for (std::uint64_t t = offsets_[i]; t < offsets_[i + 1]; ++t) {
      A.dense_[i * p_ + cols_[t]] = vals_[t];
    }
  }
  return A;
}

std::vector<std::uint8_t> ProjectionMatrix::to_bytes() const {
  std::vector<std::uint8_t> buf;
  buf.insert(buf.end(), kMagic, kMagic + 4);
  io::put_u32(buf, kVersion);
  io::put_u64(buf, d_);
  io::put_u64(buf, p_);
  buf.push_back(static_cast<std::uint8_t>(storage_));
  io::put_f64(buf, scale_);

  nlohmann::ordered_json meta;
  to_json(meta, meta_.spec);
  meta["q_mask"] = meta_.q_mask;
  meta["seed"] = meta_.seed;
  const std::string meta_str = meta.dump();
  io::put_u32(buf, static_cast<std::uint32_t>(meta_str.size()));
  buf.insert(buf.end(), meta_str.begin(), meta_str.end());

  if (storage_ == Storage::dense) {
    for (double v : dense_) io::put_f64(buf, v);
  } else {
    io::put_u64(buf, cols_.size());
    for (std::uint64_t v : offsets_) io::put_u64(buf, v);
    for (std::uint64_t v : cols_) io::put_u64(buf, v);
    for (double v : vals_) io::put_f64(buf, v);
  }

  io::put_u32(buf, io::crc32(buf.data(), buf.size()));
  return buf;
}

ProjectionMatrix ProjectionMatrix::from_bytes(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 + 4 + 8 + 8 + 1 + 8 + 4 + 4) {
    throw std::runtime_error("matrix file too short");
  }
  const std::uint32_t stored_crc = bytes[bytes.size() - 4] |
                                   (std::uint32_t(bytes[bytes.size() - 3]) << 8) |
                                   (std::uint32_t(bytes[bytes.size() - 2]) << 16) |
                                   (std::uint32_t(bytes[bytes.size() - 1]) << 24);
  if (io::crc32(bytes.data(), bytes.size() - 4) != stored_crc) {
    throw std::runtime_error("matrix file checksum mismatch");
  }

  io::ByteReader r(bytes.data(), bytes.size() - 4);
  char magic[4];
  r.get_bytes(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw std::runtime_error("bad magic, not a matrix file");
  const std::uint32_t version = r.get_u32();
  if (version != kVersion) {
    throw std::runtime_error("unsupported matrix format version " + std::to_string(version));
  }

  ProjectionMatrix A;
  A.d_ = r.get_u64();
  A.p_ = r.get_u64();
  if (A.d_ == 0 || A.p_ == 0) throw std::runtime_error("invalid header: dimensions must be positive");
  std::uint8_t storage = 0;
  r.get_bytes(&storage, 1);
  if (storage > 1) throw std::runtime_error("invalid header: unknown storage kind");
  A.storage_ = static_cast<Storage>(storage);
  A.scale_ = r.get_f64();

  const std::uint32_t meta_len = r.get_u32();
  std::string meta_str(meta_len, '\0');
  r.get_bytes(meta_str.data(), meta_len);
  nlohmann::json meta;
  try {
    meta = nlohmann::json::parse(meta_str);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("bad metadata block: ") + e.what());
  }
  A.meta_.spec = meta.get<DistributionSpec>();
  A.meta_.q_mask = meta.at("q_mask").get<double>();
  A.meta_.seed = meta.at("seed").get<std::uint64_t>();

  if (A.storage_ == Storage::dense) {
    A.dense_.resize(A.d_ * A.p_);
    for (double& v : A.dense_) v = r.get_f64();
  } else {
    const std::uint64_t nnz = r.get_u64();
    A.offsets_.resize(A.d_ + 1);
    for (std::uint64_t& v : A.offsets_) v = r.get_u64();
    if (A.offsets_.front() != 0 || A.offsets_.back() != nnz) {
      throw std::runtime_error("corrupt CSR offsets");
    }
    A.cols_.resize(nnz);
    for (std::uint64_t& v : A.cols_) v = r.get_u64();
    A.vals_.resize(nnz);
    for (double& v : A.vals_) v = r.get_f64();
    for (std::size_t i = 0; i < A.d_; ++i) {
      if (A.offsets_[i] > A.offsets_[i + 1]) throw std::runtime_error("corrupt CSR offsets");
      for (std::uint64_t t = A.offsets_[i]; t < A.offsets_[i + 1]; ++t) {
        if (A.cols_[t] >= A.p_ || (t > A.offsets_[i] && A.cols_[t - 1] >= A.cols_[t])) {
          throw std::runtime_error("corrupt CSR columns");
        }
      }
    }
  }
  if (r.remaining() != 0) throw std::runtime_error("trailing bytes after payload");
  return A;
}

void ProjectionMatrix::save(const std::string& path) const { io::write_file(path, to_bytes()); }

ProjectionMatrix ProjectionMatrix::load(const std::string& path) {
  return from_bytes(io::read_file(path));
}

}  // namespace sjl
