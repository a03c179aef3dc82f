// Copyright 2026 The bhtherm Authors
// SPDX-License-Identifier: Apache-2.0

#include "output.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "bhtherm/error.hpp"

namespace bhtherm::cli {

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error("sha256: EVP_Digest failed");
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

void write_atomic(const std::filesystem::path& path, std::string_view data) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(fmt::format("cannot open {} for writing", tmp.string()));
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw Error(fmt::format("write to {} failed", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

OutputDir::OutputDir(std::filesystem::path root) : root_(std::move(root)) {
  std::filesystem::create_directories(root_);
}

void OutputDir::write(const std::string& name, std::string_view data) {
  write_atomic(root_ / name, data);
  records_.push_back({name, sha256_hex(data), data.size()});
}

Csv::Csv(std::vector<std::string> header) : columns_(header.size()) {
  for (const auto& h : header) cell(h);
}

void Csv::cell(std::string_view text) {
  if (column_) text_ += ',';
  text_ += text;
  if (++column_ == columns_) {
    text_ += '\n';
    column_ = 0;
  }
}

Csv& Csv::operator<<(double v) {
  cell(fmt::format("{:.17g}", v));
  return *this;
}

Csv& Csv::operator<<(long long v) {
  cell(std::to_string(v));
  return *this;
}

Csv& Csv::operator<<(std::string_view v) {
  cell(v);
  return *this;
}

const std::string& Csv::str() const {
  require(column_ == 0, "Csv: incomplete row");
  return text_;
}

int Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<double> Table::numbers(std::string_view name) const {
  const int c = column(name);
  if (c < 0) throw Error(fmt::format("column '{}' missing", name));
  std::vector<double> v;
  v.reserve(rows.size());
  for (const auto& r : rows) v.push_back(std::stod(r.at(static_cast<std::size_t>(c))));
  return v;
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(fmt::format("cannot read {}", path.string()));
  Table t;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (first) {
      t.header = std::move(cells);
      first = false;
    } else {
      t.rows.push_back(std::move(cells));
    }
  }
  return t;
}

}  // namespace bhtherm::cli
