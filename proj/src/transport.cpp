// HTTP transport backed by cpp-httplib, kept in its own translation unit so
// the rest of the build does not pay for the header.
#include <memory>
#include <string>

#include <httplib.h>

#include "pageguard/gateway.hpp"

namespace pageguard {

namespace {

struct SplitUrl {
  std::string base;  // scheme://host[:port]
  std::string path;  // /v1/chat/completions
};

SplitUrl split_url(const std::string& url) {
  SplitUrl out;
  std::size_t scheme_end = url.find("://");
  std::size_t authority_begin =
      scheme_end == std::string::npos ? 0 : scheme_end + 3;
  std::size_t path_begin = url.find('/', authority_begin);
  if (path_begin == std::string::npos) {
    out.base = url;
    out.path = "/";
  } else {
    out.base = url.substr(0, path_begin);
    out.path = url.substr(path_begin);
  }
  return out;
}

class HttplibTransport : public Transport {
 public:
  HttpResult post(const HttpRequest& request) override {
    SplitUrl url = split_url(request.url);
    httplib::Client client(url.base);
    int seconds = static_cast<int>(request.timeout_seconds);
    int micros = static_cast<int>(
        (request.timeout_seconds - seconds) * 1'000'000.0);
    client.set_connection_timeout(seconds, micros);
    client.set_read_timeout(seconds, micros);
    client.set_write_timeout(seconds, micros);

    httplib::Headers headers;
    if (!request.api_key.empty())
      headers.emplace("Authorization", "Bearer " + request.api_key);

    HttpResult result;
    httplib::Result reply =
        client.Post(url.path, headers, request.body, "application/json");
    if (!reply) {
      result.transport_error = true;
      result.timed_out = reply.error() == httplib::Error::ConnectionTimeout ||
                         reply.error() == httplib::Error::Read ||
                         reply.error() == httplib::Error::Write;
      return result;
    }
    result.status = reply->status;
    result.body = reply->body;
    return result;
  }
};

}  // namespace

std::unique_ptr<Transport> make_httplib_transport() {
  return std::make_unique<HttplibTransport>();
}

}  // namespace pageguard
