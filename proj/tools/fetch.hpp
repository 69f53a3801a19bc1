#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace causirl::cli {

struct RemoteFile {
  std::string name;
  std::string url;
  std::string sha256;
};

/// The three UCI files the tabular loaders read.
const std::vector<RemoteFile>& uci_files();

std::string sha256_hex(const std::string& bytes);

/// Places every UCI file in `dest`, taking bytes from `mirror` when given and
/// over HTTPS otherwise. Files already present with the right digest are left
/// alone. Throws IntegrityError on a digest mismatch (nothing is written).
void fetch_uci(const std::filesystem::path& dest, const std::optional<std::filesystem::path>& mirror);

}  // namespace causirl::cli
