#include <sqlite3.h>

#include <mutex>

#include "recast/error.hpp"
#include "recast/service.hpp"

namespace recast {

namespace {

class Statement {
 public:
  Statement(sqlite3* db, const char* sql) : db_(db) {
    if (sqlite3_prepare_v2(db, sql, -1, &stmt_, nullptr) != SQLITE_OK)
      throw Error(std::string("sqlite prepare failed: ") + sqlite3_errmsg(db));
  }
  ~Statement() { sqlite3_finalize(stmt_); }
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  Statement& bind(int i, std::string_view text) {
    check(sqlite3_bind_text(stmt_, i, text.data(), static_cast<int>(text.size()), SQLITE_TRANSIENT));
    return *this;
  }

  /// True while a row is available.
  bool step() {
    const int rc = sqlite3_step(stmt_);
    if (rc == SQLITE_ROW) return true;
    if (rc == SQLITE_DONE) return false;
    throw Error(std::string("sqlite step failed: ") + sqlite3_errmsg(db_));
  }

  std::string text(int col) const {
    const auto* p = reinterpret_cast<const char*>(sqlite3_column_text(stmt_, col));
    return p ? std::string(p, static_cast<std::size_t>(sqlite3_column_bytes(stmt_, col))) : std::string();
  }

 private:
  void check(int rc) const {
    if (rc != SQLITE_OK) throw Error(std::string("sqlite bind failed: ") + sqlite3_errmsg(db_));
  }
  sqlite3* db_;
  sqlite3_stmt* stmt_ = nullptr;
};

}  // namespace

struct SqliteStore::Impl {
  sqlite3* db = nullptr;
  mutable std::mutex mutex;

  void exec(const char* sql) {
    char* err = nullptr;
    if (sqlite3_exec(db, sql, nullptr, nullptr, &err) != SQLITE_OK) {
      std::string msg = err ? err : "unknown error";
      sqlite3_free(err);
      throw Error("sqlite: " + msg);
    }
  }
};

SqliteStore::SqliteStore(const std::string& path) : impl_(std::make_unique<Impl>()) {
  if (sqlite3_open(path.c_str(), &impl_->db) != SQLITE_OK) {
    std::string msg = impl_->db ? sqlite3_errmsg(impl_->db) : "out of memory";
    sqlite3_close(impl_->db);
    throw Error("cannot open store " + path + ": " + msg);
  }
  sqlite3_busy_timeout(impl_->db, 5000);
  impl_->exec("PRAGMA journal_mode=WAL;");
  impl_->exec("PRAGMA synchronous=FULL;");
  impl_->exec("CREATE TABLE IF NOT EXISTS kv (key TEXT PRIMARY KEY, value TEXT NOT NULL);");
  impl_->exec(
      "CREATE TABLE IF NOT EXISTS transcripts (seq INTEGER PRIMARY KEY AUTOINCREMENT, run_id TEXT NOT NULL, "
      "label TEXT NOT NULL, request TEXT NOT NULL, response TEXT NOT NULL);");
  impl_->exec("CREATE INDEX IF NOT EXISTS transcripts_run ON transcripts(run_id, seq);");
}

SqliteStore::~SqliteStore() { sqlite3_close(impl_->db); }

void SqliteStore::put(std::string_view key, std::string_view value) {
  std::lock_guard lock(impl_->mutex);
  Statement s(impl_->db, "INSERT INTO kv(key, value) VALUES(?1, ?2) ON CONFLICT(key) DO UPDATE SET value = ?2;");
  s.bind(1, key).bind(2, value).step();
}

std::optional<std::string> SqliteStore::get(std::string_view key) const {
  std::lock_guard lock(impl_->mutex);
  Statement s(impl_->db, "SELECT value FROM kv WHERE key = ?1;");
  s.bind(1, key);
  if (!s.step()) return std::nullopt;
  return s.text(0);
}

bool SqliteStore::erase(std::string_view key) {
  std::lock_guard lock(impl_->mutex);
  Statement s(impl_->db, "DELETE FROM kv WHERE key = ?1;");
  s.bind(1, key).step();
  return sqlite3_changes(impl_->db) > 0;
}

std::vector<std::string> SqliteStore::keys(std::string_view prefix) const {
  std::lock_guard lock(impl_->mutex);
  Statement s(impl_->db, "SELECT key FROM kv WHERE substr(key, 1, length(?1)) = ?1 ORDER BY key;");
  s.bind(1, prefix);
  std::vector<std::string> out;
  while (s.step()) out.push_back(s.text(0));
  return out;
}

void SqliteStore::record(const std::string& run_id, const Transcript& t) {
  std::lock_guard lock(impl_->mutex);
  Statement s(impl_->db, "INSERT INTO transcripts(run_id, label, request, response) VALUES(?1, ?2, ?3, ?4);");
  s.bind(1, run_id).bind(2, t.label).bind(3, t.request).bind(4, t.response).step();
}

std::vector<Transcript> SqliteStore::transcripts(const std::string& run_id) const {
  std::lock_guard lock(impl_->mutex);
  Statement s(impl_->db, "SELECT label, request, response FROM transcripts WHERE run_id = ?1 ORDER BY seq;");
  s.bind(1, run_id);
  std::vector<Transcript> out;
  while (s.step()) out.push_back({s.text(0), s.text(1), s.text(2)});
  return out;
}

}  // namespace recast
