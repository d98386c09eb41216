#include "obddproof/order.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace obddproof {

std::string VarOrderSpec::label() const {
  switch (kind) {
    case OrderKind::RowMajor:
      return "row-major";
    case OrderKind::ColumnMajor:
      return "column-major";
    case OrderKind::Random:
      return "random:" + std::to_string(seed.value_or(0));
    case OrderKind::Explicit:
      return "explicit";
  }
  return "explicit";
}

VarOrderSpec VarOrderSpec::row_major(std::size_t num_vars) {
  return {VarOrder::identity(num_vars), OrderKind::RowMajor, std::nullopt};
}

VarOrderSpec VarOrderSpec::column_major(const PigeonMap& map) {
  std::vector<VarId> seq;
  seq.reserve(map.num_vars());
  for (int j = 1; j <= map.holes(); ++j) {
    for (int i = 1; i <= map.pigeons(); ++i) seq.push_back(map.var(i, j));
  }
  return {VarOrder::from_sequence(std::move(seq)), OrderKind::ColumnMajor, std::nullopt};
}

VarOrderSpec VarOrderSpec::random(std::size_t num_vars, std::uint64_t seed) {
  std::vector<VarId> seq = VarOrder::identity(num_vars).sequence();
  SeededRng rng(seed);
  rng.shuffle(seq);
  return {VarOrder::from_sequence(std::move(seq)), OrderKind::Random, seed};
}

VarOrderSpec VarOrderSpec::explicit_order(std::vector<VarId> sequence) {
  return {VarOrder::from_sequence(std::move(sequence)), OrderKind::Explicit, std::nullopt};
}

// splitmix64
std::uint64_t SeededRng::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t SeededRng::below(std::uint64_t bound) {
  if (bound == 0) throw std::invalid_argument("SeededRng::below(0)");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return x % bound;
}

VarOrderSpec parse_order_spec(std::string_view spec, std::size_t num_vars, const std::optional<PigeonMap>& map) {
  if (spec == "row-major") return VarOrderSpec::row_major(num_vars);
  if (spec == "column-major") {
    if (!map) throw std::invalid_argument("column-major order needs a pigeon map");
    if (map->num_vars() != num_vars) throw std::invalid_argument("pigeon map does not match the formula");
    return VarOrderSpec::column_major(*map);
  }
  if (spec.starts_with("random:")) {
    const auto digits = spec.substr(7);
    std::uint64_t seed = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), seed);
    if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) {
      throw std::invalid_argument("bad random order seed in '" + std::string(spec) + "'");
    }
    return VarOrderSpec::random(num_vars, seed);
  }
  if (spec.starts_with("file:")) {
    const std::string path(spec.substr(5));
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open order file '" + path + "'");
    std::vector<VarId> seq;
    long long v = 0;
    while (in >> v) {
      if (v < 1 || static_cast<std::size_t>(v) > num_vars) {
        throw std::invalid_argument("order file: variable " + std::to_string(v) + " out of range");
      }
      seq.push_back(VarId(static_cast<std::uint32_t>(v - 1)));
    }
    if (!in.eof()) throw std::invalid_argument("order file: non-numeric token");
    if (seq.size() != num_vars) {
      throw std::invalid_argument("order file lists " + std::to_string(seq.size()) + " variables, formula has " +
                                  std::to_string(num_vars));
    }
    return VarOrderSpec::explicit_order(std::move(seq));
  }
  throw std::invalid_argument("unknown order spec '" + std::string(spec) +
                              "' (expected row-major, column-major, random:<seed> or file:<path>)");
}

}  // namespace obddproof
