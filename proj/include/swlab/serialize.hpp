#pragma once

// Flat binary layout for dense operators and vectors: a JSON header file
// {N, p, q, m, rows, cols, count} next to a data file holding `count` matrices,
// each row-major with interleaved real/imaginary little-endian doubles.

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "legops.hpp"

namespace swlab {

static_assert(std::endian::native == std::endian::little, "flat binary layout assumes a little-endian host");

struct DenseHeader {
  int N = 0, p = 0, q = 0, m = 0;
  Eigen::Index rows = 0, cols = 0;
  std::size_t count = 0;
};

inline nlohmann::json to_json(const DenseHeader& h) {
  return {{"N", h.N}, {"p", h.p}, {"q", h.q}, {"m", h.m}, {"rows", h.rows}, {"cols", h.cols}, {"count", h.count}};
}

inline std::filesystem::path header_path(const std::filesystem::path& stem) { return std::filesystem::path(stem.string() + ".json"); }
inline std::filesystem::path data_path(const std::filesystem::path& stem) { return std::filesystem::path(stem.string() + ".bin"); }

/// Writes `stem`.json and `stem`.bin. All matrices must share one shape.
inline void save_dense(const std::filesystem::path& stem, const ModelSpace& space, const std::vector<Matrix>& items) {
  DenseHeader h{space.N, space.p, space.q, space.legs(), 0, 0, items.size()};
  if (!items.empty()) {
    h.rows = items.front().rows();
    h.cols = items.front().cols();
  }
  for (const auto& x : items)
    if (x.rows() != h.rows || x.cols() != h.cols) throw argument_error("save_dense: matrices differ in shape");
  if (stem.has_parent_path()) std::filesystem::create_directories(stem.parent_path());
  std::ofstream hf(header_path(stem));
  hf << to_json(h).dump() << '\n';
  std::ofstream df(data_path(stem), std::ios::binary);
  std::vector<double> row(static_cast<std::size_t>(2 * h.cols));
  for (const auto& x : items)
    for (Eigen::Index r = 0; r < h.rows; ++r) {
      for (Eigen::Index c = 0; c < h.cols; ++c) {
        row[2 * c] = x(r, c).real();
        row[2 * c + 1] = x(r, c).imag();
      }
      df.write(reinterpret_cast<const char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(double)));
    }
  if (!hf || !df) throw resource_error("save_dense: write failed for " + stem.string());
}

inline void save_dense(const std::filesystem::path& stem, const DenseOperator& x) { save_dense(stem, x.space, {x.matrix}); }

inline void save_vector(const std::filesystem::path& stem, const ModelSpace& space, const Vector& v) {
  save_dense(stem, space, {Matrix(v)});
}

struct DenseBundle {
  DenseHeader header;
  std::vector<Matrix> items;
};

inline DenseBundle load_dense(const std::filesystem::path& stem) {
  std::ifstream hf(header_path(stem));
  if (!hf) throw argument_error("load_dense: missing header " + header_path(stem).string());
  const auto j = nlohmann::json::parse(hf);
  DenseBundle b;
  b.header = DenseHeader{j.at("N"), j.at("p"), j.at("q"), j.at("m"), j.at("rows"), j.at("cols"), j.at("count")};
  const auto& h = b.header;
  if (h.rows < 0 || h.cols < 0) throw argument_error("load_dense: negative shape");
  std::ifstream df(data_path(stem), std::ios::binary);
  if (!df) throw argument_error("load_dense: missing data " + data_path(stem).string());
  const std::uintmax_t expect = h.count * static_cast<std::uintmax_t>(h.rows) * h.cols * 2 * sizeof(double);
  if (std::filesystem::file_size(data_path(stem)) != expect) throw argument_error("load_dense: data size does not match header");
  std::vector<double> row(static_cast<std::size_t>(2 * h.cols));
  for (std::size_t i = 0; i < h.count; ++i) {
    Matrix x(h.rows, h.cols);
    for (Eigen::Index r = 0; r < h.rows; ++r) {
      df.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(row.size() * sizeof(double)));
      for (Eigen::Index c = 0; c < h.cols; ++c) x(r, c) = cplx(row[2 * c], row[2 * c + 1]);
    }
    b.items.push_back(std::move(x));
  }
  return b;
}

inline DenseOperator load_dense_operator(const std::filesystem::path& stem) {
  auto b = load_dense(stem);
  if (b.items.size() != 1) throw argument_error("load_dense_operator: expected a single matrix");
  ModelSpace space(b.header.N, b.header.p, b.header.q);
  if (static_cast<std::size_t>(b.items[0].rows()) != space.dimension() || b.items[0].rows() != b.items[0].cols())
    throw argument_error("load_dense_operator: shape does not match the model space");
  return DenseOperator{space, std::move(b.items[0])};
}

} // namespace swlab
