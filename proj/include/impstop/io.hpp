#pragma once

#include <fstream> // std::ofstream
#include <string>  // std::string
#include <vector>  // std::vector

namespace impstop {

/// Fixed 17 significant digits: lossless for doubles and byte-stable.
std::string format_double(double x);

/// Comma-separated table with a header row and LF line endings.
class CsvWriter {
public:
	CsvWriter(const std::string &path, const std::vector<std::string> &header);
	void row(const std::vector<std::string> &cells);
	void row(const std::vector<double> &cells);
	bool ok() const { return static_cast<bool>(out_); }

private:
	std::ofstream out_;
};

void write_text(const std::string &path, const std::string &text);
std::string read_text(const std::string &path);

} // namespace impstop
