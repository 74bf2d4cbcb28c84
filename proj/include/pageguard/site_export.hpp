#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pageguard/corpus.hpp"
#include "pageguard/fragments.hpp"

namespace pageguard {

struct SiteManifest {
  std::vector<std::pair<std::string, std::string>> routes;  // page_id, path
  std::string index_path;
  std::string archive_path;
  std::string robots_path;
  std::string llms_path;
  std::string sitemap_path;
};

// Writes one <page_id>.html per page (defended when a fragment is given),
// plus index.html, archive.html, robots.txt, llms.txt, and sitemap.xml.
// Output bytes are a pure function of the inputs, so repeat exports are
// byte-identical.
SiteManifest export_static_site(const std::vector<const PageRecord*>& pages,
                                const std::optional<DefenseFragment>& fragment,
                                const std::string& out_dir);

}  // namespace pageguard
