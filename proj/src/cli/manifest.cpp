#include "netxfer/cli/manifest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "netxfer/errors.hpp"

namespace netxfer::cli {

namespace fs = std::filesystem;

std::string git_blob_hash(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  const bool ok = ctx && EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) && EVP_DigestUpdate(ctx, header.data(), header.size()) &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) && EVP_DigestFinal_ex(ctx, digest, &length);
  EVP_MD_CTX_free(ctx);
  if (!ok) throw DataError("sha1 digest failed");
  std::string hex(2 * length, '0');
  for (unsigned int i = 0; i < length; ++i) std::snprintf(hex.data() + 2 * i, 3, "%02x", digest[i]);
  return hex;
}

std::string git_blob_hash_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return git_blob_hash(ss.str());
}

nlohmann::json hash_tree(const fs::path& root, const fs::path& relative_to) {
  nlohmann::json out = nlohmann::json::object();
  if (fs::is_regular_file(root)) {
    out[fs::relative(root, relative_to).generic_string()] = git_blob_hash_file(root);
    return out;
  }
  if (!fs::is_directory(root)) return out;
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) out[fs::relative(f, relative_to).generic_string()] = git_blob_hash_file(f);
  return out;
}

void append_manifest(const fs::path& dir, const nlohmann::json& entry) {
  fs::create_directories(dir);
  std::ofstream out(dir / "manifest.ndjson", std::ios::app);
  if (!out) throw DataError("cannot append to " + (dir / "manifest.ndjson").string());
  out << entry.dump() << '\n';
}

std::vector<nlohmann::json> read_manifest(const fs::path& dir) {
  std::ifstream in(dir / "manifest.ndjson");
  std::vector<nlohmann::json> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  return out;
}

}  // namespace netxfer::cli
