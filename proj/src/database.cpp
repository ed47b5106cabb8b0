// Copyright (c) 2026 the promdao project developers.
// SPDX-License-Identifier: Apache-2.0

#include "promdao/database.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "json.hpp"

namespace promdao {

namespace {

using nlohmann::json;

constexpr int kFormatVersion = 1;
constexpr char kBase64Chars[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const unsigned char* data, std::size_t len) {
  std::string out;
  out.reserve((len + 2) / 3 * 4);
  for (std::size_t i = 0; i < len; i += 3) {
    unsigned int chunk = data[i] << 16;
    if (i + 1 < len) chunk |= data[i + 1] << 8;
    if (i + 2 < len) chunk |= data[i + 2];
    out.push_back(kBase64Chars[(chunk >> 18) & 63]);
    out.push_back(kBase64Chars[(chunk >> 12) & 63]);
    out.push_back(i + 1 < len ? kBase64Chars[(chunk >> 6) & 63] : '=');
    out.push_back(i + 2 < len ? kBase64Chars[chunk & 63] : '=');
  }
  return out;
}

std::vector<unsigned char> base64_decode(const std::string& text) {
  int lookup[256];
  std::fill(std::begin(lookup), std::end(lookup), -1);
  for (int i = 0; i < 64; ++i) lookup[static_cast<unsigned char>(kBase64Chars[i])] = i;
  std::vector<unsigned char> out;
  out.reserve(text.size() / 4 * 3);
  unsigned int chunk = 0;
  int bits = 0;
  for (char c : text) {
    if (c == '=') break;
    const int v = lookup[static_cast<unsigned char>(c)];
    require(v >= 0, Errc::IoError, "invalid base64 payload");
    chunk = (chunk << 6) | static_cast<unsigned int>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<unsigned char>((chunk >> bits) & 0xff));
    }
  }
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  const int rows = static_cast<int>(m.rows());
  const int cols = static_cast<int>(m.cols());
  std::vector<double> row_major(static_cast<std::size_t>(rows) * cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) row_major[static_cast<std::size_t>(i) * cols + j] = m(i, j);
  return json{{"rows", rows},
              {"cols", cols},
              {"data", base64_encode(reinterpret_cast<const unsigned char*>(row_major.data()),
                                     row_major.size() * sizeof(double))}};
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  require(j.contains("rows") && j.contains("cols") && j.contains("data"), Errc::IoError,
          "matrix entry missing fields");
  const int rows = j.at("rows").get<int>();
  const int cols = j.at("cols").get<int>();
  require(rows >= 0 && cols >= 0, Errc::IoError, "negative matrix dimensions");
  const std::vector<unsigned char> bytes = base64_decode(j.at("data").get<std::string>());
  require(bytes.size() == static_cast<std::size_t>(rows) * cols * sizeof(double), Errc::IoError,
          "matrix payload size mismatch");
  Eigen::MatrixXd m(rows, cols);
  const double* values = reinterpret_cast<const double*>(bytes.data());
  for (int i = 0; i < rows; ++i)
    for (int j2 = 0; j2 < cols; ++j2) m(i, j2) = values[static_cast<std::size_t>(i) * cols + j2];
  return m;
}

json vector_to_json(const Eigen::VectorXd& v) {
  return matrix_to_json(Eigen::MatrixXd(v));
}

Eigen::VectorXd vector_from_json(const json& j) {
  const Eigen::MatrixXd m = matrix_from_json(j);
  require(m.cols() <= 1, Errc::IoError, "expected a column vector");
  return m.cols() == 1 ? Eigen::VectorXd(m.col(0)) : Eigen::VectorXd(0);
}

const char* method_name(AsMethod m) {
  switch (m) {
    case AsMethod::None: return "none";
    case AsMethod::Classical: return "classical";
    case AsMethod::Alternative: return "alternative";
  }
  return "none";
}

AsMethod method_from_name(const std::string& s) {
  if (s == "classical") return AsMethod::Classical;
  if (s == "alternative") return AsMethod::Alternative;
  require(s == "none", Errc::IoError, "unknown AS method tag: " + s);
  return AsMethod::None;
}

std::string digest_to_hex(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

std::uint64_t digest_from_hex(const std::string& s) {
  require(s.size() == 16, Errc::IoError, "bad digest length");
  return std::stoull(s, nullptr, 16);
}

}  // namespace

void PromDatabase::require_consistent_dims() const {
  for (const PromEntry& e : entries) {
    require(e.mu_r.size() == basis.n_G, Errc::DimensionMismatch,
            "database entry mu_r has wrong dimension");
    require(e.tuple.nf == entries.front().tuple.nf && e.tuple.ns == entries.front().tuple.ns,
            Errc::DimensionMismatch, "database entries have mixed reduced dimensions");
  }
}

void save_database(const PromDatabase& db, const std::string& path) {
  json root;
  root["format_version"] = kFormatVersion;
  root["hdm_digest"] = digest_to_hex(db.hdm_digest);
  root["ref_index"] = db.ref_index;
  root["consistency_applied"] = db.consistency_applied;
  root["budget_exhausted"] = db.budget_exhausted;
  root["history"] = db.history;

  json basis;
  basis["method"] = method_name(db.basis.method);
  basis["n_G"] = db.basis.n_G;
  basis["V_mu"] = matrix_to_json(db.basis.V_mu);
  basis["singular_values"] = vector_to_json(db.basis.singular_values);
  if (db.as_snapshots.size() > 0) basis["snapshots"] = matrix_to_json(db.as_snapshots);
  root["basis"] = basis;

  json entries = json::array();
  for (const PromEntry& e : db.entries) {
    json je;
    je["mu_r"] = vector_to_json(e.mu_r);
    je["mu"] = vector_to_json(e.mu);
    je["n_f"] = e.tuple.nf;
    je["n_s"] = e.tuple.ns;
    je["calA_r"] = matrix_to_json(e.tuple.calA_r);
    je["calB_r"] = matrix_to_json(e.tuple.calB_r);
    je["V_w"] = matrix_to_json(e.V_w);
    je["V_u"] = matrix_to_json(e.V_u);
    je["W_w"] = matrix_to_json(e.W_w);
    je["projection"] = e.projection == Projection::Galerkin ? "galerkin" : "petrov_galerkin";
    entries.push_back(std::move(je));
  }
  root["entries"] = std::move(entries);

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), Errc::IoError, "cannot open " + tmp + " for writing");
    out << root.dump(2) << "\n";
    require(out.good(), Errc::IoError, "write to " + tmp + " failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  require(!ec, Errc::IoError, "atomic rename to " + path + " failed: " + ec.message());
}

PromDatabase load_database(const std::string& path, std::optional<std::uint64_t> expected_digest) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), Errc::IoError, "cannot open " + path);
  json root;
  try {
    in >> root;
  } catch (const json::exception& e) {
    fail(Errc::IoError, std::string("malformed database file: ") + e.what());
  }
  try {
    require(root.contains("format_version"), Errc::FormatVersionMismatch,
            "missing format_version");
    require(root.at("format_version").get<int>() == kFormatVersion, Errc::FormatVersionMismatch,
            "unsupported database format version");

    PromDatabase db;
    db.hdm_digest = digest_from_hex(root.at("hdm_digest").get<std::string>());
    if (expected_digest.has_value()) {
      require(*expected_digest == db.hdm_digest, Errc::DigestMismatch,
              "database was built from a different HDM configuration");
    }
    db.ref_index = root.at("ref_index").get<int>();
    db.consistency_applied = root.at("consistency_applied").get<bool>();
    db.budget_exhausted = root.at("budget_exhausted").get<bool>();
    db.history = root.at("history").get<std::vector<double>>();

    const json& basis = root.at("basis");
    db.basis.method = method_from_name(basis.at("method").get<std::string>());
    db.basis.n_G = basis.at("n_G").get<int>();
    db.basis.V_mu = matrix_from_json(basis.at("V_mu"));
    db.basis.singular_values = vector_from_json(basis.at("singular_values"));
    if (basis.contains("snapshots")) db.as_snapshots = matrix_from_json(basis.at("snapshots"));

    for (const json& je : root.at("entries")) {
      PromEntry e;
      e.mu_r = vector_from_json(je.at("mu_r"));
      e.mu = vector_from_json(je.at("mu"));
      e.tuple.nf = je.at("n_f").get<int>();
      e.tuple.ns = je.at("n_s").get<int>();
      e.tuple.calA_r = matrix_from_json(je.at("calA_r"));
      e.tuple.calB_r = matrix_from_json(je.at("calB_r"));
      require(e.tuple.calA_r.rows() == e.tuple.nq() && e.tuple.calB_r.rows() == e.tuple.nq(),
              Errc::IoError, "tuple dimensions disagree with n_f, n_s");
      e.V_w = matrix_from_json(je.at("V_w"));
      e.V_u = matrix_from_json(je.at("V_u"));
      e.W_w = matrix_from_json(je.at("W_w"));
      e.projection = je.at("projection").get<std::string>() == "galerkin"
                         ? Projection::Galerkin
                         : Projection::PetrovGalerkin;
      db.entries.push_back(std::move(e));
    }
    db.require_consistent_dims();
    return db;
  } catch (const json::exception& e) {
    fail(Errc::IoError, std::string("malformed database file: ") + e.what());
  }
}

}  // namespace promdao
