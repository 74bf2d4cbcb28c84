#include "pageguard/site_export.hpp"

#include <filesystem>
#include <fstream>

#include "pageguard/errors.hpp"
#include "pageguard/html.hpp"

namespace pageguard {

namespace {

// Stable absolute base for sitemap <loc> entries; crawlers require absolute
// URLs and the host string does not affect any metric.
constexpr std::string_view kSiteBase = "https://example-ledger.example/";

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoFailure("cannot open for writing: " + path.string());
  out << bytes;
  if (!out) throw IoFailure("write failed: " + path.string());
}

std::string link_list_page(const std::string& title,
                           const std::vector<const PageRecord*>& pages) {
  std::string body;
  body += "<!DOCTYPE html>\n<html>\n<head><title>" + html::escape_text(title) +
          "</title></head>\n<body>\n<h1>" + html::escape_text(title) +
          "</h1>\n<ul>\n";
  for (const PageRecord* page : pages) {
    body += "<li><a href=\"" + page->page_id + ".html\">" +
            html::escape_text(page->article_title) + "</a></li>\n";
  }
  body += "</ul>\n</body>\n</html>\n";
  return body;
}

}  // namespace

SiteManifest export_static_site(const std::vector<const PageRecord*>& pages,
                                const std::optional<DefenseFragment>& fragment,
                                const std::string& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoFailure("cannot create output directory: " + out_dir);
  const std::filesystem::path root(out_dir);

  SiteManifest manifest;
  for (const PageRecord* page : pages) {
    std::string relative = page->page_id + ".html";
    write_file(root / relative,
               render_defended_page(*page, fragment, DefenseMode::kUrlExport));
    manifest.routes.emplace_back(page->page_id, relative);
  }

  write_file(root / "index.html", link_list_page("The Example Ledger", pages));
  write_file(root / "archive.html",
             link_list_page("The Example Ledger — Archive", pages));
  manifest.index_path = "index.html";
  manifest.archive_path = "archive.html";

  std::string robots =
      "User-agent: *\nAllow: /\nSitemap: " + std::string(kSiteBase) +
      "sitemap.xml\n";
  write_file(root / "robots.txt", robots);
  manifest.robots_path = "robots.txt";

  std::string llms =
      "# The Example Ledger\n\n"
      "A local-news archive of synthetic articles; every article page "
      "carries a reporter contact card. Stable routes, no scripts, no "
      "tracking.\n\n## Articles\n\n";
  for (const auto& [page_id, relative] : manifest.routes)
    llms += "- [" + page_id + "](" + std::string(kSiteBase) + relative + ")\n";
  write_file(root / "llms.txt", llms);
  manifest.llms_path = "llms.txt";

  std::string sitemap =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<urlset xmlns=\"http://www.sitemaps.org/schemas/sitemap/0.9\">\n";
  auto url_entry = [&](const std::string& relative) {
    return "  <url><loc>" + std::string(kSiteBase) + relative +
           "</loc></url>\n";
  };
  for (const auto& [page_id, relative] : manifest.routes)
    sitemap += url_entry(relative);
  sitemap += url_entry("index.html");
  sitemap += url_entry("archive.html");
  sitemap += "</urlset>\n";
  write_file(root / "sitemap.xml", sitemap);
  manifest.sitemap_path = "sitemap.xml";

  return manifest;
}

}  // namespace pageguard
