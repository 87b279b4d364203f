#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "rlfc/decoder.hpp"
#include "rlfc/lightfield.hpp"
#include "rlfc/renderer.hpp"

namespace rlfc {

struct ServiceConfig {
  int max_dimension = 1024;
  std::optional<std::filesystem::path> assets_dir;  // built-in index page when unset
};

struct HttpReply {
  int status = 200;
  std::string content_type;
  std::string body;
};

using QueryParams = std::map<std::string, std::string>;

/// Request handlers over one immutable decoder state. Every handler is const
/// and keeps its render memo on the stack, so calls may run concurrently.
class ViewService {
 public:
  ViewService(DecoderState state, CameraGrid cameras, ServiceConfig config = {});

  HttpReply info() const;
  /// s, t fractional camera-plane coordinates; optional w, h (native size),
  /// level (0) and focus (image-plane depth).
  HttpReply view(const QueryParams& query) const;
  /// Integer s, t; the decoded sample view.
  HttpReply image(const QueryParams& query) const;
  HttpReply asset(const std::string& path) const;

  /// Pose used by view(): the eye sits on the camera plane at (s, t) and
  /// looks through the image-plane extent.
  CameraPose pose_for(double s, double t, int width, int height) const;

  const DecoderState& state() const { return state_; }
  const CameraGrid& cameras() const { return cameras_; }

 private:
  DecoderState state_;
  CameraGrid cameras_;
  ServiceConfig config_;
};

/// HTTP/1.1 front end. The underlying server handles requests on a worker
/// pool.
class HttpServer {
 public:
  explicit HttpServer(const ViewService& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds without serving; port 0 picks a free port. Returns the bound port.
  /// Throws IoError when the address is unavailable.
  int bind(const std::string& host, int port);
  /// Blocks until stop().
  void run();
  /// Returns once run() has started accepting connections.
  void wait_until_ready() const;
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rlfc
