// Copyright 2026 The CalliSense Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "callisense/server.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <system_error>
#include <utility>

#include "callisense/compare.h"
#include "callisense/error.h"
#include "callisense/image.h"
#include "callisense/pipeline.h"
#include "httplib.h"
#include "spdlog/spdlog.h"

namespace callisense {

namespace fs = std::filesystem;

std::shared_ptr<const SessionIndex> SessionIndex::Build(const fs::path& dir) {
  auto index = std::make_shared<SessionIndex>();
  std::vector<fs::path> files;
  std::error_code ec;
  for (fs::directory_iterator it(dir, ec), end; !ec && it != end;
       it.increment(ec)) {
    if (it->is_regular_file() && it->path().extension() == ".json") {
      files.push_back(it->path());
    }
  }
  if (ec) spdlog::warn("cannot scan {}: {}", dir.string(), ec.message());
  std::sort(files.begin(), files.end());
  for (const fs::path& path : files) {
    SessionEntry e;
    try {
      e.document = ReadFileBytes(path);
      const Session s = ParseSession(e.document);
      e.id = s.id;
      e.role = s.role;
      e.character_label = s.character_label;
      e.stroke_count = static_cast<int>(s.strokes.size());
      e.frame_count = s.frame_count;
      e.frames_dir = s.frames_dir;
    } catch (const Error& err) {
      spdlog::warn("skipping {}: {}", path.string(), err.what());
      continue;
    }
    e.path = path;
    e.mtime = fs::last_write_time(path, ec);
    if (index->Find(e.id) != nullptr) {
      spdlog::warn("skipping {}: duplicate session id '{}'", path.string(), e.id);
      continue;
    }
    const auto pos = std::lower_bound(
        index->entries_.begin(), index->entries_.end(), e.id,
        [](const SessionEntry& a, const std::string& id) { return a.id < id; });
    index->entries_.insert(pos, std::move(e));
  }
  return index;
}

const SessionEntry* SessionIndex::Find(const std::string& id) const {
  const auto it = std::lower_bound(
      entries_.begin(), entries_.end(), id,
      [](const SessionEntry& a, const std::string& v) { return a.id < v; });
  return it != entries_.end() && it->id == id ? &*it : nullptr;
}

namespace {

ApiResponse ErrorResponse(int status, const std::string& message) {
  return {status, "application/json", Json{{"error", message}}.dump()};
}

std::optional<int64_t> ParseInt(const std::string& text) {
  int64_t v = 0;
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return v;
}

void Send(httplib::Response& res, const ApiResponse& r) {
  res.status = r.status;
  res.set_content(r.body, r.content_type);
}

std::optional<std::string> Param(const httplib::Request& req, const char* key) {
  if (!req.has_param(key)) return std::nullopt;
  return req.get_param_value(key);
}

}  // namespace

SessionServer::SessionServer(fs::path data_dir,
                             std::optional<fs::path> static_dir)
    : data_dir_(std::move(data_dir)), static_dir_(std::move(static_dir)) {
  Refresh();
}

SessionServer::~SessionServer() = default;

void SessionServer::Refresh() {
  auto fresh = SessionIndex::Build(data_dir_);
  spdlog::info("indexed {} sessions in {}", fresh->entries().size(),
               data_dir_.string());
  std::lock_guard<std::mutex> lock(mu_);
  index_ = std::move(fresh);
}

std::shared_ptr<const SessionIndex> SessionServer::index() const {
  std::lock_guard<std::mutex> lock(mu_);
  return index_;
}

ApiResponse SessionServer::ListSessions() const {
  Json list = Json::array();
  for (const SessionEntry& e : index()->entries()) {
    list.push_back(Json{{"id", e.id},
                        {"role", RoleName(e.role)},
                        {"character_label", e.character_label},
                        {"stroke_count", e.stroke_count}});
  }
  return {200, "application/json", list.dump()};
}

ApiResponse SessionServer::GetSession(const std::string& id) const {
  const auto idx = index();
  const SessionEntry* e = idx->Find(id);
  if (e == nullptr) return ErrorResponse(404, "unknown session '" + id + "'");
  return {200, "application/json", e->document};
}

ApiResponse SessionServer::Compare(
    const std::string& teacher, const std::string& student,
    const std::optional<std::string>& samples,
    const std::optional<std::string>& grid_ms) const {
  ReportOptions options;
  if (samples) {
    const auto v = ParseInt(*samples);
    if (!v || *v < 2 || *v > 100000) {
      return ErrorResponse(400, "samples must be an integer in [2, 100000]");
    }
    options.samples = static_cast<int>(*v);
  }
  if (grid_ms) {
    const auto v = ParseInt(*grid_ms);
    if (!v || *v < 1) return ErrorResponse(400, "grid_ms must be a positive integer");
    options.grid_ms = *v;
  }
  const auto idx = index();
  const SessionEntry* t = idx->Find(teacher);
  if (t == nullptr) return ErrorResponse(404, "unknown session '" + teacher + "'");
  const SessionEntry* s = idx->Find(student);
  if (s == nullptr) return ErrorResponse(404, "unknown session '" + student + "'");
  try {
    return {200, "application/json",
            ReportToString(CompareSessionFiles(t->path, s->path, options))};
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::kEmptySession) return ErrorResponse(422, e.what());
    return ErrorResponse(500, e.what());
  }
}

ApiResponse SessionServer::GetFrame(const std::string& id,
                                    const std::string& n) const {
  const auto idx = index();
  const SessionEntry* e = idx->Find(id);
  if (e == nullptr) return ErrorResponse(404, "unknown session '" + id + "'");
  if (!e->frames_dir) return ErrorResponse(404, "frames not retained");
  const auto k = ParseInt(n);
  if (!k) return ErrorResponse(400, "frame index must be an integer");
  if (*k < 0 || *k >= e->frame_count) {
    return ErrorResponse(404, "frame " + n + " out of range");
  }
  char name[32];
  std::snprintf(name, sizeof(name), "frame_%05lld.png",
                static_cast<long long>(*k));
  try {
    return {200, "image/png",
            ReadFileBytes(e->path.parent_path() / *e->frames_dir / name)};
  } catch (const Error&) {
    return ErrorResponse(404, "frames not retained");
  }
}

void SessionServer::Mount(httplib::Server& server) {
  server.Get("/api/sessions", [this](const httplib::Request&,
                                     httplib::Response& res) {
    Send(res, ListSessions());
  });
  server.Get(R"(/api/sessions/([^/]+))",
             [this](const httplib::Request& req, httplib::Response& res) {
               Send(res, GetSession(req.matches[1]));
             });
  server.Get(R"(/api/sessions/([^/]+)/frames/([^/]+))",
             [this](const httplib::Request& req, httplib::Response& res) {
               Send(res, GetFrame(req.matches[1], req.matches[2]));
             });
  server.Get("/api/compare", [this](const httplib::Request& req,
                                    httplib::Response& res) {
    const auto teacher = Param(req, "teacher");
    const auto student = Param(req, "student");
    if (!teacher || !student) {
      Send(res, ErrorResponse(400, "teacher and student are required"));
      return;
    }
    Send(res, Compare(*teacher, *student, Param(req, "samples"),
                      Param(req, "grid_ms")));
  });
  server.Post("/api/refresh", [this](const httplib::Request&,
                                     httplib::Response& res) {
    Refresh();
    Send(res, {200, "application/json",
               Json{{"count", index()->entries().size()}}.dump()});
  });
  server.Options(R"(/api/.*)",
                 [](const httplib::Request&, httplib::Response& res) {
                   res.status = 204;
                 });
  server.set_post_routing_handler(
      [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Origin", "*");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
      });
  if (static_dir_) {
    if (!server.set_mount_point("/", static_dir_->string())) {
      spdlog::warn("static directory {} not found", static_dir_->string());
    }
  }
}

bool SessionServer::Listen(const std::string& host, int port) {
  if (!http_) {
    http_ = std::make_unique<httplib::Server>();
    Mount(*http_);
  }
  return http_->listen(host, port);
}

int SessionServer::BindToAnyPort(const std::string& host) {
  if (!http_) {
    http_ = std::make_unique<httplib::Server>();
    Mount(*http_);
  }
  return http_->bind_to_any_port(host);
}

bool SessionServer::ListenAfterBind() {
  return http_ && http_->listen_after_bind();
}

void SessionServer::Stop() {
  if (http_) http_->stop();
}

}  // namespace callisense
