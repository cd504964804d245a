def reverse_text(text):
    out = ''
    for ch in text:
        out = ch + out
    return out
