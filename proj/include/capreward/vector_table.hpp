#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace capreward {

/// Phrase -> unit vector table exported from an external sentence encoder.
///
/// Binary layout (little-endian):
///   "CAPV" | u32 version=1 | u32 dimension | u64 count
///   count x { u32 byte_length | utf-8 phrase | dimension x f32 }
/// Text layout: one `phrase<TAB>v0 v1 ... v{d-1}` per line.
///
/// Keys are normalized with normalize_phrase and vectors are rescaled to
/// unit norm on insertion; zero vectors are rejected.
class VectorTable {
 public:
  explicit VectorTable(std::size_t dimension);

  void insert(std::string_view phrase, std::span<const double> vector);
  // nullptr on a miss. `phrase` must already be normalized.
  const std::vector<double>* find(std::string_view phrase) const;

  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return entries_.size(); }
  const std::map<std::string, std::vector<double>, std::less<>>& entries() const { return entries_; }

  static VectorTable load(const std::filesystem::path& path);  // sniffs the magic
  static VectorTable load_binary(const std::filesystem::path& path);
  static VectorTable load_text(const std::filesystem::path& path);
  void save_binary(const std::filesystem::path& path) const;

 private:
  std::size_t dimension_;
  std::map<std::string, std::vector<double>, std::less<>> entries_;
};

}  // namespace capreward
