#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>

#include "capreward/error.hpp"
#include "capreward/scene_graph.hpp"
#include "capreward/vector_table.hpp"

namespace capreward {

static_assert(std::endian::native == std::endian::little, "vector table I/O assumes a little-endian host");

namespace {

constexpr char kMagic[4] = {'C', 'A', 'P', 'V'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
T read_pod(std::istream& in, const char* what) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw InputError(std::string("vector table truncated while reading ") + what);
  return value;
}

template <typename T>
void write_pod(std::ostream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

}  // namespace

VectorTable::VectorTable(std::size_t dimension) : dimension_(dimension) {
  if (dimension_ == 0) throw InputError("vector table dimension must be at least 1");
}

void VectorTable::insert(std::string_view phrase, std::span<const double> vector) {
  if (vector.size() != dimension_)
    throw InputError("vector for '" + std::string(phrase) + "' has dimension " + std::to_string(vector.size()) +
                     ", expected " + std::to_string(dimension_));
  double norm = 0.0;
  for (double v : vector) {
    if (!std::isfinite(v)) throw InputError("non-finite component in vector for '" + std::string(phrase) + "'");
    norm += v * v;
  }
  norm = std::sqrt(norm);
  if (norm == 0.0) throw InputError("zero vector for '" + std::string(phrase) + "'");
  std::vector<double> unit(vector.begin(), vector.end());
  for (double& v : unit) v /= norm;
  std::string key = normalize_phrase(phrase);
  if (key.empty()) throw InputError("empty phrase in vector table");
  entries_[std::move(key)] = std::move(unit);
}

const std::vector<double>* VectorTable::find(std::string_view phrase) const {
  auto it = entries_.find(phrase);
  return it == entries_.end() ? nullptr : &it->second;
}

VectorTable VectorTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open vector table " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  if (in && std::memcmp(magic, kMagic, 4) == 0) return load_binary(path);
  return load_text(path);
}

VectorTable VectorTable::load_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open vector table " + path.string());
  char magic[4] = {};
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw InputError(path.string() + ": bad magic, expected CAPV");
  auto version = read_pod<std::uint32_t>(in, "version");
  if (version != kVersion) throw InputError(path.string() + ": unsupported version " + std::to_string(version));
  auto dim = read_pod<std::uint32_t>(in, "dimension");
  auto count = read_pod<std::uint64_t>(in, "entry count");

  VectorTable table(dim);
  std::vector<float> raw(dim);
  std::vector<double> vec(dim);
  for (std::uint64_t i = 0; i < count; ++i) {
    auto len = read_pod<std::uint32_t>(in, "phrase length");
    std::string phrase(len, '\0');
    in.read(phrase.data(), len);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(dim * sizeof(float)));
    if (!in) throw InputError(path.string() + ": truncated at entry " + std::to_string(i));
    for (std::size_t k = 0; k < dim; ++k) vec[k] = raw[k];
    table.insert(phrase, vec);
  }
  return table;
}

VectorTable VectorTable::load_text(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open vector table " + path.string());
  std::optional<VectorTable> table;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": expected phrase<TAB>floats");
    std::istringstream values(line.substr(tab + 1));
    std::vector<double> vec;
    double v = 0.0;
    while (values >> v) vec.push_back(v);
    if (!values.eof())
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": malformed number");
    if (!table) table.emplace(vec.size());
    table->insert(line.substr(0, tab), vec);
  }
  if (!table) throw InputError(path.string() + ": empty vector table");
  return std::move(*table);
}

void VectorTable::save_binary(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write vector table " + path.string());
  out.write(kMagic, 4);
  write_pod<std::uint32_t>(out, kVersion);
  write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(dimension_));
  write_pod<std::uint64_t>(out, entries_.size());
  for (const auto& [phrase, vec] : entries_) {
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(phrase.size()));
    out.write(phrase.data(), static_cast<std::streamsize>(phrase.size()));
    for (double v : vec) write_pod<float>(out, static_cast<float>(v));
  }
}

}  // namespace capreward
