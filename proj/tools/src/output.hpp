// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace bhtherm::cli {

std::string sha256_hex(std::string_view data);

/// Writes `data` to `path` through a temporary file and a rename.
void write_atomic(const std::filesystem::path& path, std::string_view data);

struct OutputRecord {
  std::string name;
  std::string sha256;
  std::size_t bytes = 0;
};

/// Output directory of one run; remembers what was written for the manifest.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root);

  void write(const std::string& name, std::string_view data);
  const std::filesystem::path& root() const { return root_; }
  const std::vector<OutputRecord>& records() const { return records_; }

 private:
  std::filesystem::path root_;
  std::vector<OutputRecord> records_;
};

/// CSV text with a header row; doubles at 17 significant digits.
class Csv {
 public:
  explicit Csv(std::vector<std::string> header);

  Csv& operator<<(double v);
  Csv& operator<<(long long v);
  Csv& operator<<(int v) { return *this << static_cast<long long>(v); }
  Csv& operator<<(std::size_t v) { return *this << static_cast<long long>(v); }
  Csv& operator<<(std::string_view v);
  Csv& operator<<(const char* v) { return *this << std::string_view(v); }

  const std::string& str() const;

 private:
  void cell(std::string_view text);

  std::size_t columns_;
  std::size_t column_ = 0;
  std::string text_;
};

/// Comma-separated table read back from a file written by Csv.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column(std::string_view name) const;  ///< -1 if absent
  std::vector<double> numbers(std::string_view name) const;
};

Table read_csv(const std::filesystem::path& path);

}  // namespace bhtherm::cli
