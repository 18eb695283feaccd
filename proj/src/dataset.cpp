#include "sjl/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sjl {

DataSet::DataSet(std::size_t n, std::size_t p, std::vector<double> values)
    : n_(n), p_(p), values_(std::move(values)) {
  if (values_.size() != n_ * p_) {
    throw std::invalid_argument("dataset values size does not match n * p");
  }
}

const std::vector<PairNorms>& DataSet::pair_norms() const {
  if (pair_cache_ready_) return pair_cache_;
  pair_cache_.clear();
  pair_cache_.reserve(n_ * (n_ - 1) / 2);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double* a = row(i);
      const double* b = row(j);
      PairNorms pn;
      pn.i = i;
      pn.j = j;
      for (std::size_t k = 0; k < p_; ++k) {
        const double dk = a[k] - b[k];
        const double d2 = dk * dk;
        pn.l2sq += d2;
        pn.l4p4 += d2 * d2;
        pn.linfsq = std::max(pn.linfsq, d2);
      }
      pair_cache_.push_back(pn);
    }
  }
  pair_cache_ready_ = true;
  return pair_cache_;
}

std::vector<std::pair<std::size_t, std::size_t>> DataSet::zero_distance_pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const PairNorms& pn : pair_norms()) {
    if (pn.l2sq == 0.0) out.emplace_back(pn.i, pn.j);
  }
  return out;
}

namespace {

bool parse_row(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) comma = line.size();
    const std::string cell = line.substr(pos, comma - pos);
    try {
      std::size_t used = 0;
      const double v = std::stod(cell, &used);
      while (used < cell.size() && std::isspace(static_cast<unsigned char>(cell[used]))) ++used;
      if (used != cell.size()) return false;
      out.push_back(v);
    } catch (const std::exception&) {
      return false;
    }
    pos = comma + 1;
    if (comma == line.size()) break;
  }
  return !out.empty();
}

}  // namespace

DataSet parse_csv(std::istream& in, const std::string& name) {
  std::vector<double> values;
  std::vector<double> rowbuf;
  std::size_t p = 0, n = 0, lineno = 0;
  std::string line;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!parse_row(line, rowbuf)) {
      if (first_content_line) {  // header
        first_content_line = false;
        continue;
      }
      throw std::runtime_error(name + ": line " + std::to_string(lineno) + " is not numeric");
    }
    first_content_line = false;
    if (p == 0) {
      p = rowbuf.size();
    } else if (rowbuf.size() != p) {
      throw std::runtime_error(name + ": line " + std::to_string(lineno) + " has " +
                               std::to_string(rowbuf.size()) + " columns, expected " +
                               std::to_string(p));
    }
    values.insert(values.end(), rowbuf.begin(), rowbuf.end());
    ++n;
  }
  if (n == 0) throw std::runtime_error(name + ": no data rows");
  return DataSet(n, p, std::move(values));
}

DataSet load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_csv(in, path);
}

void write_csv(const DataSet& data, std::ostream& out) {
  for (std::size_t k = 0; k < data.p(); ++k) {
    out << (k ? ",c" : "c") << k;
  }
  out << '\n';
  char buf[32];
  for (std::size_t i = 0; i < data.n(); ++i) {
    for (std::size_t k = 0; k < data.p(); ++k) {
      std::snprintf(buf, sizeof(buf), "%.17g", data.at(i, k));
      if (k) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

void save_csv(const DataSet& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_csv(data, out);
  if (!out) throw std::runtime_error("write to " + path + " failed");
}

}  // namespace sjl
