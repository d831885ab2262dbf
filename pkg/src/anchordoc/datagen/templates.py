"""Code snippet templates, about ten per language.

Templates are written with four-space indentation steps; the generator converts
each step into the language's own indent unit. Placeholders: ``{fn}``, ``{var}``,
``{item}``, ``{cls}``, ``{n}``, ``{m}``.
"""

PYTHON = [
    """def {fn}({var}):
    total = 0
    for {item} in {var}:
        total += {item}
    return total""",
    """def {fn}({var}, limit={n}):
    out = []
    for {item} in {var}:
        if {item} > limit:
            out.append({item})
    return out""",
    """class {cls}:
    def __init__(self, {var}):
        self.{var} = {var}

    def {fn}(self):
        if not self.{var}:
            return None
        return self.{var}[0]""",
    """def {fn}(path):
    with open(path) as fh:
        for line in fh:
            if line.startswith("#"):
                continue
            yield line.strip()""",
    """def {fn}({var}):
    seen = set()
    for {item} in {var}:
        if {item} in seen:
            return True
        seen.add({item})
    return False""",
    """def {fn}(n={n}):
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a""",
    """def {fn}({var}):
    try:
        return int({var})
    except ValueError:
        return {m}""",
    """def {fn}(grid):
    rows = len(grid)
    for i in range(rows):
        for j in range(len(grid[i])):
            if grid[i][j] == {n}:
                return i, j
    return None""",
    """async def {fn}(client, {var}):
    results = {{}}
    for {item} in {var}:
        results[{item}] = await client.get({item})
    return results""",
    """def {fn}({var}, key=None):
    groups = {{}}
    for {item} in {var}:
        k = key({item}) if key else {item}
        groups.setdefault(k, []).append({item})
    return groups""",
]

CPP = [
    """int {fn}(const std::vector<int>& {var}) {{
    int total = 0;
    for (int {item} : {var}) {{
        total += {item};
    }}
    return total;
}}""",
    """class {cls} {{
public:
    explicit {cls}(int {var}) : {var}_({var}) {{}}
    int {fn}() const {{
        if ({var}_ > {n}) {{
            return {var}_ - {n};
        }}
        return 0;
    }}
private:
    int {var}_;
}};""",
    """bool {fn}(const std::string& {var}) {{
    for (char c : {var}) {{
        if (!std::isdigit(c)) {{
            return false;
        }}
    }}
    return true;
}}""",
    """template <typename T>
T {fn}(T a, T b) {{
    while (b != 0) {{
        T t = b;
        b = a % b;
        a = t;
    }}
    return a;
}}""",
    """void {fn}(std::vector<int>& {var}) {{
    for (size_t i = 0; i < {var}.size(); ++i) {{
        for (size_t j = i + 1; j < {var}.size(); ++j) {{
            if ({var}[j] < {var}[i]) {{
                std::swap({var}[i], {var}[j]);
            }}
        }}
    }}
}}""",
    """int {fn}(int n) {{
    if (n < 2) {{
        return n;
    }}
    return {fn}(n - 1) + {fn}(n - 2);
}}""",
    """std::map<std::string, int> {fn}(const std::vector<std::string>& {var}) {{
    std::map<std::string, int> counts;
    for (const auto& {item} : {var}) {{
        ++counts[{item}];
    }}
    return counts;
}}""",
    """struct {cls} {{
    int x;
    int y;
    int {fn}() const {{
        return x * x + y * y;
    }}
}};""",
    """int main() {{
    int {var} = {n};
    while ({var} > 0) {{
        std::cout << {var} << std::endl;
        {var} -= {m};
    }}
    return 0;
}}""",
    """double {fn}(const std::vector<double>& {var}) {{
    if ({var}.empty()) {{
        return 0.0;
    }}
    double s = 0.0;
    for (double {item} : {var}) {{
        s += {item};
    }}
    return s / {var}.size();
}}""",
]

GO = [
    """func {fn}({var} []int) int {{
    total := 0
    for _, {item} := range {var} {{
        total += {item}
    }}
    return total
}}""",
    """func {fn}({var} []string) map[string]int {{
    counts := make(map[string]int)
    for _, {item} := range {var} {{
        counts[{item}]++
    }}
    return counts
}}""",
    """type {cls} struct {{
    {var} int
}}

func (c *{cls}) {fn}() int {{
    if c.{var} > {n} {{
        return c.{var}
    }}
    return {m}
}}""",
    """func {fn}(path string) error {{
    f, err := os.Open(path)
    if err != nil {{
        return err
    }}
    defer f.Close()
    return nil
}}""",
    """func {fn}(n int) int {{
    a, b := 0, 1
    for i := 0; i < n; i++ {{
        a, b = b, a+b
    }}
    return a
}}""",
    """func {fn}(grid [][]int) (int, int) {{
    for i, row := range grid {{
        for j, v := range row {{
            if v == {n} {{
                return i, j
            }}
        }}
    }}
    return -1, -1
}}""",
    """func {fn}(ch chan int, {var} []int) {{
    for _, {item} := range {var} {{
        select {{
        case ch <- {item}:
        default:
            return
        }}
    }}
}}""",
    """func {fn}(s string) bool {{
    for i := 0; i < len(s)/2; i++ {{
        if s[i] != s[len(s)-1-i] {{
            return false
        }}
    }}
    return true
}}""",
    """func main() {{
    {var} := {n}
    for {var} > 0 {{
        fmt.Println({var})
        {var} -= {m}
    }}
}}""",
    """func {fn}(m map[string]int) []string {{
    keys := make([]string, 0, len(m))
    for k := range m {{
        keys = append(keys, k)
    }}
    sort.Strings(keys)
    return keys
}}""",
]

JAVASCRIPT = [
    """function {fn}({var}) {{
    let total = 0;
    for (const {item} of {var}) {{
        total += {item};
    }}
    return total;
}}""",
    """const {fn} = ({var}) => {{
    return {var}.filter(({item}) => {{
        if ({item} > {n}) {{
            return true;
        }}
        return false;
    }});
}};""",
    """class {cls} {{
    constructor({var}) {{
        this.{var} = {var};
    }}

    {fn}() {{
        if (!this.{var}) {{
            return null;
        }}
        return this.{var}[0];
    }}
}}""",
    """async function {fn}(url) {{
    try {{
        const res = await fetch(url);
        return await res.json();
    }} catch (err) {{
        return null;
    }}
}}""",
    """function {fn}({var}) {{
    const seen = new Set();
    for (const {item} of {var}) {{
        if (seen.has({item})) {{
            return true;
        }}
        seen.add({item});
    }}
    return false;
}}""",
    """function {fn}(n = {n}) {{
    let a = 0, b = 1;
    for (let i = 0; i < n; i++) {{
        [a, b] = [b, a + b];
    }}
    return a;
}}""",
    """export function {fn}(grid) {{
    for (let i = 0; i < grid.length; i++) {{
        for (let j = 0; j < grid[i].length; j++) {{
            if (grid[i][j] === {n}) {{
                return [i, j];
            }}
        }}
    }}
    return null;
}}""",
    """function {fn}({var}, key) {{
    const groups = {{}};
    for (const {item} of {var}) {{
        const k = key ? key({item}) : {item};
        (groups[k] = groups[k] || []).push({item});
    }}
    return groups;
}}""",
    """document.addEventListener("click", (event) => {{
    if (event.target.matches(".{var}")) {{
        event.preventDefault();
        {fn}(event.target);
    }}
}});""",
    """function {fn}(str) {{
    return str
        .split(" ")
        .map((w) => w[0].toUpperCase() + w.slice(1))
        .join(" ");
}}""",
]

TEMPLATES = {"python": PYTHON, "cpp": CPP, "go": GO, "javascript": JAVASCRIPT}
