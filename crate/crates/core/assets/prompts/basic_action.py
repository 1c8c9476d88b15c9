class BasicAction:
    def __init__(self, predicates, change_pos, mapping_fn):
        assert len(change_pos) == len(mapping_fn)
        self.predicates = predicates
        self.change_pos = change_pos
        self.mapping_fn = mapping_fn

    def __call__(self, tokens):
        # tokens: ['#', '@', p1, '@', ..., '@', pn, '@', '#']
        width = len(self.predicates)
        sites = []
        for start in range(len(tokens) - width + 1):
            window = tokens[start:start + width]
            if all(p(t) for p, t in zip(self.predicates, window)):
                sites.append(start)
        edits = {}
        for start in sites:
            for pos, fn in zip(self.change_pos, self.mapping_fn):
                edits.setdefault(start + pos, fn)
        out = []
        for i, tok in enumerate(tokens):
            if i not in edits:
                out.append(tok)
                continue
            new = edits[i](tok)
            if new == '!':
                if tok not in ('#', '@'):
                    continue
                out.append(tok)
            elif tok in ('#', '@'):
                out.append(tok)
                out.append(new.replace(tok, ''))
            else:
                out.append(new)
        return out
