#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace netxfer::cli {

// Hex SHA-1 of "blob <size>\0<content>", as git computes object ids.
std::string git_blob_hash(std::string_view content);
std::string git_blob_hash_file(const std::filesystem::path& path);

// {relative path: hash} for a file, or for every regular file under a directory.
nlohmann::json hash_tree(const std::filesystem::path& root, const std::filesystem::path& relative_to);

// Appends one JSON object as a line to <dir>/manifest.ndjson.
void append_manifest(const std::filesystem::path& dir, const nlohmann::json& entry);
std::vector<nlohmann::json> read_manifest(const std::filesystem::path& dir);

}  // namespace netxfer::cli
