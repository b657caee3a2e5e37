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

// Read-only HTTP API over a directory of processed sessions.
//
//   GET  /api/sessions                      [{id, role, character_label,
//                                             stroke_count}]
//   GET  /api/sessions/{id}                 the session document verbatim
//   GET  /api/sessions/{id}/frames/{n}      retained frame n as PNG
//   GET  /api/compare?teacher=&student=[&samples=][&grid_ms=]
//   POST /api/refresh                       rescans the data directory
//
// Errors carry {"error": "..."} bodies.

#ifndef CALLISENSE_SERVER_H_
#define CALLISENSE_SERVER_H_

#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "callisense/model.h"

namespace httplib {
class Server;
}  // namespace httplib

namespace callisense {

struct SessionEntry {
  std::string id;
  std::filesystem::path path;
  Role role = Role::kTeacher;
  std::string character_label;
  int stroke_count = 0;
  int frame_count = 0;
  std::optional<std::string> frames_dir;
  std::filesystem::file_time_type mtime;
  // File contents as validated.
  std::string document;
};

// Immutable snapshot of the valid sessions in a directory, ordered by id.
class SessionIndex {
 public:
  // Scans *.json files in filename order. Files that fail validation are
  // skipped with a warning; of two files claiming one id the first is kept.
  static std::shared_ptr<const SessionIndex> Build(
      const std::filesystem::path& dir);

  const std::vector<SessionEntry>& entries() const { return entries_; }
  const SessionEntry* Find(const std::string& id) const;

 private:
  std::vector<SessionEntry> entries_;
};

struct ApiResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

class SessionServer {
 public:
  explicit SessionServer(std::filesystem::path data_dir,
                         std::optional<std::filesystem::path> static_dir = {});
  ~SessionServer();

  SessionServer(const SessionServer&) = delete;
  SessionServer& operator=(const SessionServer&) = delete;

  // Builds a fresh index and swaps it in whole.
  void Refresh();
  std::shared_ptr<const SessionIndex> index() const;

  ApiResponse ListSessions() const;
  ApiResponse GetSession(const std::string& id) const;
  ApiResponse Compare(const std::string& teacher, const std::string& student,
                      const std::optional<std::string>& samples,
                      const std::optional<std::string>& grid_ms) const;
  ApiResponse GetFrame(const std::string& id, const std::string& n) const;

  // Registers every route on `server`.
  void Mount(httplib::Server& server);

  // Blocks until Stop(). Returns false if the socket could not be bound.
  bool Listen(const std::string& host, int port);
  // Binds an ephemeral port and returns it, or -1. Serve with ListenAfterBind.
  int BindToAnyPort(const std::string& host);
  bool ListenAfterBind();
  void Stop();

 private:
  std::filesystem::path data_dir_;
  std::optional<std::filesystem::path> static_dir_;
  mutable std::mutex mu_;
  std::shared_ptr<const SessionIndex> index_;
  std::unique_ptr<httplib::Server> http_;
};

}  // namespace callisense

#endif  // CALLISENSE_SERVER_H_
