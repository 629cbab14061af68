#include "spectral/instance_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "spectral/errors.hpp"

namespace spectral {

namespace {

constexpr std::array<char, 4> kMagic{'S', 'P', 'X', 'I'};
constexpr std::uint32_t kKindSubspace = 1;
constexpr std::uint32_t kKindDecomp = 2;
constexpr std::uint32_t kKindSpiked = 3;
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 32;

template <typename T>
T swap_to_le(T value) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    std::reverse(bytes, bytes + sizeof(T));
    std::memcpy(&value, bytes, sizeof(T));
  }
  return value;
}

class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}
  template <typename T>
  void scalar(T v) {
    v = swap_to_le(v);
    out_.write(reinterpret_cast<const char*>(&v), sizeof v);
  }
  void doubles(std::span<const double> xs) {
    for (double x : xs) scalar(x);
  }

 private:
  std::ostream& out_;
};

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}
  template <typename T>
  T scalar() {
    T v{};
    if (!in_.read(reinterpret_cast<char*>(&v), sizeof v)) throw ArgumentError("instance file: unexpected end of data");
    return swap_to_le(v);
  }
  std::vector<double> doubles(std::uint64_t count) {
    if (count > kMaxElements) throw ArgumentError("instance file: array too large");
    std::vector<double> xs(static_cast<std::size_t>(count));
    for (double& x : xs) x = scalar<double>();
    return xs;
  }

 private:
  std::istream& in_;
};

// Row-major copies of column-major Eigen matrices.
std::vector<double> row_major(const Matrix& m) {
  std::vector<double> out(static_cast<std::size_t>(m.size()));
  RowMap(out.data(), m.rows(), m.cols()) = m;
  return out;
}

Matrix from_row_major(const std::vector<double>& xs, std::uint64_t rows, std::uint64_t cols) {
  return ConstRowMap(xs.data(), static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector to_vector(const std::vector<double>& xs) {
  return Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

void check_dims(std::uint64_t a, std::uint64_t b) {
  if (a == 0 || b == 0 || a > (1u << 24) || b > (1u << 24)) throw ArgumentError("instance file: bad dimensions");
}

nlohmann::json encode_array(std::span<const double> xs, std::vector<std::uint64_t> shape) {
  std::vector<std::uint8_t> bytes(xs.size() * sizeof(double));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double le = swap_to_le(xs[i]);
    std::memcpy(bytes.data() + i * sizeof(double), &le, sizeof(double));
  }
  return {{"shape", shape}, {"dtype", "<f8"}, {"data", base64_encode(bytes)}};
}

std::vector<double> decode_array(const nlohmann::json& doc, const std::string& name, std::uint64_t expected) {
  const auto& arrays = doc.at("arrays");
  if (!arrays.contains(name)) throw ArgumentError("instance json: missing array '" + name + "'");
  const auto& a = arrays.at(name);
  if (a.value("dtype", "") != "<f8") throw ArgumentError("instance json: array '" + name + "' must have dtype <f8");
  const auto bytes = base64_decode(a.at("data").get<std::string>());
  if (bytes.size() != expected * sizeof(double))
    throw ArgumentError("instance json: array '" + name + "' has " + std::to_string(bytes.size() / sizeof(double)) +
                        " entries, expected " + std::to_string(expected));
  std::vector<double> xs(static_cast<std::size_t>(expected));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double v;
    std::memcpy(&v, bytes.data() + i * sizeof(double), sizeof(double));
    xs[i] = swap_to_le(v);
  }
  return xs;
}

}  // namespace

void write_instance_binary(std::ostream& out, const Instance& inst) {
  Writer w(out);
  out.write(kMagic.data(), kMagic.size());
  w.scalar(kInstanceFormatVersion);
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SubspaceInstance>) {
          w.scalar(kKindSubspace);
          w.scalar(std::uint64_t{x.seed});
          w.scalar(std::uint64_t{x.n});
          w.scalar(std::uint64_t{x.d});
          w.scalar(x.epsilon);
          w.scalar(std::uint32_t{x.basis_mode == BasisMode::good ? 1u : 0u});
          w.scalar(std::uint32_t{0});
          w.doubles(row_major(x.basis));
          w.doubles(to_std(x.planted));
          w.doubles(row_major(x.hidden_good_basis));
        } else if constexpr (std::is_same_v<T, DecompInstance>) {
          w.scalar(kKindDecomp);
          w.scalar(std::uint64_t{x.seed});
          w.scalar(std::uint64_t{x.d});
          w.scalar(std::uint64_t{x.n});
          w.doubles(row_major(x.components.transpose()));
          w.doubles(x.tensor.entries());
        } else {
          w.scalar(kKindSpiked);
          w.scalar(std::uint64_t{x.seed});
          w.scalar(std::uint64_t{x.d});
          w.scalar(x.tau);
          w.doubles(to_std(x.spike));
          w.doubles(x.tensor.entries());
        }
      },
      inst);
  if (!out) throw std::runtime_error("instance file: write failed");
}

Instance read_instance_binary(std::istream& in) {
  std::array<char, 4> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) throw ArgumentError("instance file: bad magic");
  Reader r(in);
  if (const auto version = r.scalar<std::uint32_t>(); version != kInstanceFormatVersion)
    throw ArgumentError("instance file: unsupported version " + std::to_string(version));
  const auto kind = r.scalar<std::uint32_t>();
  const auto seed = r.scalar<std::uint64_t>();
  if (kind == kKindSubspace) {
    SubspaceInstance x;
    x.seed = seed;
    const auto n = r.scalar<std::uint64_t>();
    const auto d = r.scalar<std::uint64_t>();
    check_dims(n, d);
    x.n = n;
    x.d = d;
    x.epsilon = r.scalar<double>();
    x.basis_mode = r.scalar<std::uint32_t>() == 1 ? BasisMode::good : BasisMode::rotated;
    r.scalar<std::uint32_t>();
    x.basis = from_row_major(r.doubles(n * d), n, d);
    x.planted = to_vector(r.doubles(n));
    x.hidden_good_basis = from_row_major(r.doubles(n * d), n, d);
    return x;
  }
  if (kind == kKindDecomp) {
    DecompInstance x;
    x.seed = seed;
    const auto d = r.scalar<std::uint64_t>();
    const auto n = r.scalar<std::uint64_t>();
    check_dims(d, n);
    x.d = d;
    x.n = n;
    x.components = from_row_major(r.doubles(n * d), n, d).transpose();
    x.tensor = Tensor3(d, r.doubles(d * d * d), true);
    return x;
  }
  if (kind == kKindSpiked) {
    SpikeInstance x;
    x.seed = seed;
    const auto d = r.scalar<std::uint64_t>();
    check_dims(d, 1);
    x.d = d;
    x.tau = r.scalar<double>();
    x.spike = to_vector(r.doubles(d));
    x.tensor = Tensor3(d, r.doubles(d * d * d), false);
    return x;
  }
  throw ArgumentError("instance file: unknown kind " + std::to_string(kind));
}

nlohmann::json instance_to_json(const Instance& inst) {
  nlohmann::json doc{{"format", "spectral-instance"}, {"version", kInstanceFormatVersion}};
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        doc["seed"] = x.seed;
        if constexpr (std::is_same_v<T, SubspaceInstance>) {
          doc["kind"] = "subspace";
          doc["n"] = x.n;
          doc["d"] = x.d;
          doc["epsilon"] = x.epsilon;
          doc["basis_mode"] = std::string(to_string(x.basis_mode));
          doc["arrays"] = {{"basis", encode_array(row_major(x.basis), {x.n, x.d})},
                           {"planted", encode_array(to_std(x.planted), {x.n})},
                           {"hidden_good_basis", encode_array(row_major(x.hidden_good_basis), {x.n, x.d})}};
        } else if constexpr (std::is_same_v<T, DecompInstance>) {
          doc["kind"] = "decomposition";
          doc["d"] = x.d;
          doc["n"] = x.n;
          doc["arrays"] = {{"components", encode_array(row_major(x.components.transpose()), {x.n, x.d})},
                           {"tensor", encode_array(x.tensor.entries(), {x.d, x.d, x.d})}};
        } else {
          doc["kind"] = "spiked";
          doc["d"] = x.d;
          doc["tau"] = x.tau;
          doc["arrays"] = {{"spike", encode_array(to_std(x.spike), {x.d})},
                           {"tensor", encode_array(x.tensor.entries(), {x.d, x.d, x.d})}};
        }
      },
      inst);
  return doc;
}

Instance instance_from_json(const nlohmann::json& doc) {
  try {
    if (doc.value("format", "") != "spectral-instance") throw ArgumentError("instance json: wrong format tag");
    if (doc.at("version").get<std::uint32_t>() != kInstanceFormatVersion)
      throw ArgumentError("instance json: unsupported version");
    const auto kind = doc.at("kind").get<std::string>();
    const auto seed = doc.at("seed").get<std::uint64_t>();
    if (kind == "subspace") {
      SubspaceInstance x;
      x.seed = seed;
      x.n = doc.at("n").get<std::size_t>();
      x.d = doc.at("d").get<std::size_t>();
      check_dims(x.n, x.d);
      x.epsilon = doc.at("epsilon").get<double>();
      x.basis_mode = basis_mode_from_string(doc.at("basis_mode").get<std::string>());
      x.basis = from_row_major(decode_array(doc, "basis", x.n * x.d), x.n, x.d);
      x.planted = to_vector(decode_array(doc, "planted", x.n));
      x.hidden_good_basis = from_row_major(decode_array(doc, "hidden_good_basis", x.n * x.d), x.n, x.d);
      return x;
    }
    if (kind == "decomposition") {
      DecompInstance x;
      x.seed = seed;
      x.d = doc.at("d").get<std::size_t>();
      x.n = doc.at("n").get<std::size_t>();
      check_dims(x.d, x.n);
      x.components = from_row_major(decode_array(doc, "components", x.n * x.d), x.n, x.d).transpose();
      x.tensor = Tensor3(x.d, decode_array(doc, "tensor", x.d * x.d * x.d), true);
      return x;
    }
    if (kind == "spiked") {
      SpikeInstance x;
      x.seed = seed;
      x.d = doc.at("d").get<std::size_t>();
      check_dims(x.d, 1);
      x.tau = doc.at("tau").get<double>();
      x.spike = to_vector(decode_array(doc, "spike", x.d));
      x.tensor = Tensor3(x.d, decode_array(doc, "tensor", x.d * x.d * x.d), false);
      return x;
    }
    throw ArgumentError("instance json: unknown kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("instance json: ") + e.what());
  }
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open instance file '" + path + "'");
  if (in.peek() == kMagic[0]) return read_instance_binary(in);
  try {
    return instance_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw ArgumentError("instance file '" + path + "': " + e.what());
  }
}

void save_instance(const std::string& path, const Instance& inst, bool as_json) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write instance file '" + path + "'");
  if (as_json)
    out << instance_to_json(inst).dump() << '\n';
  else
    write_instance_binary(out, inst);
}

namespace {

constexpr std::string_view kAlphabet = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

}  // namespace

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (std::uint32_t{bytes[i]} << 16) | (std::uint32_t{bytes[i + 1]} << 8) | bytes[i + 2];
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += kAlphabet[v & 63];
  }
  if (const std::size_t rest = bytes.size() - i; rest > 0) {
    std::uint32_t v = std::uint32_t{bytes[i]} << 16;
    if (rest == 2) v |= std::uint32_t{bytes[i + 1]} << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += rest == 2 ? kAlphabet[(v >> 6) & 63] : '=';
    out += '=';
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(std::string_view text) {
  if (text.size() % 4 != 0) throw ArgumentError("base64: length is not a multiple of 4");
  std::array<int, 256> lookup;
  lookup.fill(-1);
  for (std::size_t i = 0; i < kAlphabet.size(); ++i) lookup[static_cast<unsigned char>(kAlphabet[i])] = static_cast<int>(i);
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    std::uint32_t v = 0;
    int pad = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=' && i + 4 == text.size() && k >= 2) {
        ++pad;
        v <<= 6;
        continue;
      }
      const int x = lookup[static_cast<unsigned char>(c)];
      if (x < 0 || pad > 0) throw ArgumentError("base64: invalid character");
      v = (v << 6) | static_cast<std::uint32_t>(x);
    }
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(v & 0xff));
  }
  return out;
}

}  // namespace spectral
