// Copyright 2026 The AttnBM Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "attnbm/serialize.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "attnbm/errors.hpp"

namespace attnbm {

namespace {

void put_u32(std::vector<char>& buf, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) buf.push_back(static_cast<char>(v >> (8 * i)));
}

void put_i32(std::vector<char>& buf, std::int32_t v) {
  put_u32(buf, static_cast<std::uint32_t>(v));
}

void put_f64(std::vector<char>& buf, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, sizeof(bits));
  for (int i = 0; i < 8; ++i) buf.push_back(static_cast<char>(bits >> (8 * i)));
}

struct Reader {
  std::vector<char> buf;
  std::size_t pos = 0;

  void need(std::size_t n, const char* what) const {
    if (pos + n > buf.size()) throw FormatError(what, pos);
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
      v |= std::uint32_t(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
    }
    pos += 4;
    return v;
  }
  std::int32_t i32(const char* what) {
    return static_cast<std::int32_t>(u32(what));
  }
  std::uint8_t u8(const char* what) {
    need(1, what);
    return static_cast<std::uint8_t>(buf[pos++]);
  }
  double f64(const char* what) {
    need(8, what);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) {
      bits |= std::uint64_t(static_cast<unsigned char>(buf[pos + i]))
              << (8 * i);
    }
    pos += 8;
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }
  void expect_magic(const char* magic) {
    need(4, "missing magic");
    if (std::memcmp(buf.data() + pos, magic, 4) != 0) {
      throw FormatError("bad magic", pos);
    }
    pos += 4;
  }
};

Reader open_reader(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path, 0);
  Reader r;
  r.buf.assign((std::istreambuf_iterator<char>(in)),
               std::istreambuf_iterator<char>());
  return r;
}

void write_all(const std::vector<char>& buf, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out ||
      !out.write(buf.data(), static_cast<std::streamsize>(buf.size()))) {
    throw std::runtime_error("cannot write " + path);
  }
}

void put_matrix(std::vector<char>& buf, const MemoryMatrix& xi) {
  for (int i = 0; i < xi.rows(); ++i) {
    for (int j = 0; j < xi.cols(); ++j) put_f64(buf, xi(i, j));
  }
}

MemoryMatrix read_matrix(Reader& r, std::uint32_t p, std::uint32_t n) {
  if (p == 0 || n == 0) throw FormatError("empty matrix", r.pos);
  MemoryMatrix xi(p, n);
  for (std::uint32_t i = 0; i < p; ++i) {
    for (std::uint32_t j = 0; j < n; ++j) {
      xi(i, j) = r.f64("truncated matrix payload");
    }
  }
  return xi;
}

std::uint8_t potential_tag(const ScalarPotential& pot) {
  return static_cast<std::uint8_t>(pot.kind);
}

ScalarPotential potential_from_tag(std::uint8_t tag, std::int32_t power,
                                   std::size_t offset) {
  if (tag > static_cast<std::uint8_t>(PotentialKind::Abs)) {
    throw FormatError("unknown potential tag", offset);
  }
  ScalarPotential pot;
  pot.kind = static_cast<PotentialKind>(tag);
  pot.power = power;
  if (pot.kind == PotentialKind::Power && power < 2) {
    throw FormatError("bad power exponent", offset);
  }
  return pot;
}

}  // namespace

void save_model(const AttnBmModel& model, const std::string& path) {
  validate_memory(model.xi);
  std::vector<char> buf{'A', 'B', 'M', '1'};
  put_u32(buf, static_cast<std::uint32_t>(model.memories()));
  put_u32(buf, static_cast<std::uint32_t>(model.dim()));
  put_f64(buf, model.beta);
  buf.push_back(model.beta_kind == BetaKind::Integer ? 0 : 1);
  put_matrix(buf, model.xi);
  write_all(buf, path);
}

AttnBmModel load_model(const std::string& path) {
  Reader r = open_reader(path);
  r.expect_magic("ABM1");
  const std::uint32_t p = r.u32("truncated header");
  const std::uint32_t n = r.u32("truncated header");
  const double beta = r.f64("truncated header");
  const std::uint8_t kind = r.u8("truncated header");
  if (kind > 1) throw FormatError("bad beta kind", r.pos - 1);
  if (kind == 0 && beta != static_cast<double>(static_cast<int>(beta))) {
    throw FormatError("integer beta kind with non-integer value", r.pos - 1);
  }
  MemoryMatrix xi = read_matrix(r, p, n);
  if (kind == 0) {
    return make_integer_beta_model(std::move(xi), static_cast<int>(beta));
  }
  return make_real_beta_model(std::move(xi), beta);
}

void save_efh(const EfhSpec& spec, const std::string& path) {
  std::vector<char> buf{'E', 'F', 'H', '1'};
  put_u32(buf, static_cast<std::uint32_t>(spec.hidden_units()));
  put_u32(buf, static_cast<std::uint32_t>(spec.visible_units()));
  put_f64(buf, spec.beta());
  buf.push_back(static_cast<char>(potential_tag(spec.lagrangians().hidden)));
  put_i32(buf, spec.lagrangians().hidden.power);
  buf.push_back(static_cast<char>(potential_tag(spec.lagrangians().visible)));
  put_i32(buf, spec.lagrangians().visible.power);
  put_matrix(buf, spec.xi());
  write_all(buf, path);
}

EfhSpec load_efh(const std::string& path) {
  Reader r = open_reader(path);
  r.expect_magic("EFH1");
  const std::uint32_t p = r.u32("truncated header");
  const std::uint32_t n = r.u32("truncated header");
  const double beta = r.f64("truncated header");
  const std::uint8_t f_tag = r.u8("truncated header");
  const std::int32_t f_power = r.i32("truncated header");
  const std::uint8_t g_tag = r.u8("truncated header");
  const std::int32_t g_power = r.i32("truncated header");
  LagrangianPair lag;
  lag.hidden = potential_from_tag(f_tag, f_power, r.pos);
  lag.visible = potential_from_tag(g_tag, g_power, r.pos);
  MemoryMatrix xi = read_matrix(r, p, n);
  return EfhSpec(std::move(xi), lag, beta);
}

void save_mixture(const GaussianMixture& gmm, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  char cell[64];
  std::snprintf(cell, sizeof(cell), "%.17g", gmm.variance);
  out << gmm.components() << " " << gmm.dim() << " " << cell << "\n";
  for (int k = 0; k < gmm.components(); ++k) {
    std::snprintf(cell, sizeof(cell), "%.17g", gmm.weights[k]);
    out << cell;
    for (int j = 0; j < gmm.dim(); ++j) {
      std::snprintf(cell, sizeof(cell), "%.17g", gmm.means(k, j));
      out << " " << cell;
    }
    out << "\n";
  }
  if (!out) throw std::runtime_error("cannot write " + path);
}

GaussianMixture load_mixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path, 0);
  int m = 0, n = 0;
  double variance = 0.0;
  if (!(in >> m >> n >> variance) || m < 1 || n < 1) {
    throw FormatError("mixture: bad header", 0);
  }
  Vector weights(m);
  Matrix means(m, n);
  for (int k = 0; k < m; ++k) {
    if (!(in >> weights[k])) throw FormatError("mixture: truncated", 0);
    for (int j = 0; j < n; ++j) {
      if (!(in >> means(k, j))) throw FormatError("mixture: truncated", 0);
    }
  }
  return make_mixture(std::move(weights), std::move(means), variance);
}

}  // namespace attnbm
