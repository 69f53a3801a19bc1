#include "fetch.hpp"

#include <curl/curl.h>
#include <openssl/evp.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "causirl/error.hpp"

namespace causirl::cli {

namespace {

constexpr const char* kUciBase = "https://archive.ics.uci.edu/ml/machine-learning-databases/";

std::size_t append_body(char* data, std::size_t size, std::size_t count, void* user) {
  static_cast<std::string*>(user)->append(data, size * count);
  return size * count;
}

std::string download(const std::string& url) {
  CURL* curl = curl_easy_init();
  if (!curl) throw IoError("cannot initialise HTTP client");
  std::string body;
  curl_easy_setopt(curl, CURLOPT_URL, url.c_str());
  curl_easy_setopt(curl, CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(curl, CURLOPT_FAILONERROR, 1L);
  curl_easy_setopt(curl, CURLOPT_CONNECTTIMEOUT, 30L);
  curl_easy_setopt(curl, CURLOPT_WRITEFUNCTION, append_body);
  curl_easy_setopt(curl, CURLOPT_WRITEDATA, &body);
  const CURLcode rc = curl_easy_perform(curl);
  curl_easy_cleanup(curl);
  if (rc != CURLE_OK) throw IoError(url + ": " + curl_easy_strerror(rc));
  return body;
}

std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

const std::vector<RemoteFile>& uci_files() {
  static const std::vector<RemoteFile> files{
      {"adult.data", std::string(kUciBase) + "adult/adult.data",
       "5b00264637dbfec36bdeaab5676b0b309ff9eb788d63554ca0a249491c86603d"},
      {"adult.test", std::string(kUciBase) + "adult/adult.test",
       "a2a9044bc167a35b2361efbabec64e89d69ce82d9790d2980119aac5fd7e9c05"},
      {"german.data", std::string(kUciBase) + "statlog/german/german.data",
       "b21f3d81db8071257d5ff1deaeba1fd4303b62712e6fcc9715c7a86202cb5871"},
  };
  return files;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (!EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr)) {
    throw IoError("sha256 failed");
  }
  std::string hex;
  char pair[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(pair, sizeof pair, "%02x", digest[i]);
    hex += pair;
  }
  return hex;
}

void fetch_uci(const std::filesystem::path& dest, const std::optional<std::filesystem::path>& mirror) {
  std::error_code ec;
  std::filesystem::create_directories(dest, ec);
  if (ec) throw IoError("cannot create " + dest.string() + ": " + ec.message());
  for (const auto& file : uci_files()) {
    const auto target = dest / file.name;
    if (auto existing = read_file(target); existing && sha256_hex(*existing) == file.sha256) {
      std::cerr << file.name << ": present, checksum ok\n";
      continue;
    }
    std::string bytes;
    if (mirror) {
      auto local = read_file(*mirror / file.name);
      if (!local) throw IoError("missing " + (*mirror / file.name).string());
      bytes = std::move(*local);
    } else {
      bytes = download(file.url);
    }
    const std::string got = sha256_hex(bytes);
    if (got != file.sha256) {
      throw IntegrityError(file.name + ": sha256 " + got + " does not match expected " + file.sha256);
    }
    const auto partial = target.string() + ".part";
    {
      std::ofstream out(partial, std::ios::binary);
      out << bytes;
      if (!out) throw IoError("cannot write " + partial);
    }
    std::filesystem::rename(partial, target);
    std::cerr << file.name << ": fetched, checksum ok\n";
  }
}

}  // namespace causirl::cli
